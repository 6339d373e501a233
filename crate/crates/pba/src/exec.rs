//! Execution dispatch for the data-parallel inner loops.
//!
//! With the default `parallel` feature the scans fan out over rayon; without
//! it they run sequentially. Results are identical either way — callers only
//! hand in independent per-index work and order-insensitive reductions.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Whether `pred` holds for every index in `0..n`.
pub(crate) fn all<F>(n: usize, pred: F) -> bool
where
    F: Fn(usize) -> bool + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).all(pred)
    }
}

/// Map `f` over `0..n`, preserving index order in the output.
pub(crate) fn map<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Map `f` over the items, flattening the per-item result vectors in item
/// order.
pub(crate) fn flat_map<I, T, F>(items: Vec<I>, f: F) -> Vec<T>
where
    I: Send,
    T: Send,
    F: Fn(I) -> Vec<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.into_par_iter().flat_map_iter(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.into_iter().flat_map(f).collect()
    }
}

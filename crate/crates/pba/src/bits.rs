//! Packed bit rows used by the relation scans.
//!
//! All hot loops (partial order closure, exclusivity, clique search) work on
//! `u64` blocks instead of per-element sets.

/// Number of 64-bit blocks needed to hold `n` bits.
pub(crate) fn blocks_for(n: usize) -> usize {
    n.div_ceil(64)
}

/// A dense symmetric/asymmetric boolean matrix stored as packed rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct BitMatrix {
    n: usize,
    width: usize,
    rows: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let width = blocks_for(n);
        BitMatrix {
            n,
            width,
            rows: vec![0u64; n * width],
        }
    }

    /// Assemble from per-row blocks (each of width `blocks_for(n)`).
    pub fn from_rows(n: usize, rows: Vec<Vec<u64>>) -> Self {
        let width = blocks_for(n);
        debug_assert!(rows.len() == n && rows.iter().all(|r| r.len() == width));
        BitMatrix {
            n,
            width,
            rows: rows.into_iter().flatten().collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i * self.width + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        let slot = &mut self.rows[i * self.width + j / 64];
        if value {
            *slot |= 1 << (j % 64);
        } else {
            *slot &= !(1 << (j % 64));
        }
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.rows[i * self.width..(i + 1) * self.width]
    }

    /// Indices of set bits in row `i`, ascending.
    pub fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.row(i))
    }
}

/// Iterate set bit positions of a packed row, ascending.
pub(crate) fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(b, &word)| {
        let mut w = word;
        std::iter::from_fn(move || {
            if w == 0 {
                None
            } else {
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(b * 64 + bit)
            }
        })
    })
}

/// `a ⊆ b` on packed rows of equal width.
#[inline]
pub(crate) fn is_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

/// Whether two packed rows share a set bit.
#[inline]
pub(crate) fn intersects(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).any(|(x, y)| x & y != 0)
}

pub(crate) fn count(a: &[u64]) -> usize {
    a.iter().map(|w| w.count_ones() as usize).sum()
}

//! Sequential reference paths for the rayon-backed scans.
//!
//! With the `parallel` feature disabled these are what the public API runs;
//! with it enabled they stay available for differential tests and for the
//! benchmark suite comparing both executions.

use crate::algebra::PartialBooleanAlgebra;
use crate::graph::{AtomGraph, CliqueCover, GraphError};
use crate::state::{GraphState, StateError};
use crate::witness::{AlphaResult, WeightFunction, WitnessError};

/// Sequential transitivity scan.
pub fn is_transitive(algebra: &PartialBooleanAlgebra) -> bool {
    let up = algebra.up_matrix_serial();
    (0..algebra.len()).all(|a| algebra.transitive_row_ok(&up, a))
}

/// Sequential exclusivity scan.
pub fn satisfies_lep(algebra: &PartialBooleanAlgebra) -> bool {
    let up = algebra.up_matrix_serial();
    let upn = algebra.upn_matrix_serial();
    (0..algebra.len()).all(|a| algebra.lep_row_ok(&up, &upn, a))
}

/// Sequential maximal-clique enumeration.
pub fn maximal_cliques(graph: &AtomGraph) -> Result<CliqueCover, GraphError> {
    graph.maximal_cliques_serial()
}

/// Sequential 0-1 state enumeration.
pub fn zero_one_states(graph: &AtomGraph) -> Result<Vec<GraphState>, StateError> {
    crate::state::zero_one_states_serial(graph)
}

/// Sequential exact weighted independence number.
pub fn alpha(graph: &AtomGraph, weights: &WeightFunction) -> Result<AlphaResult, WitnessError> {
    let n = graph.len();
    if n == 0 {
        return Ok(AlphaResult {
            value: 0.0,
            set: vec![],
        });
    }
    if n > crate::witness::WITNESS_VERTEX_CAP || weights.weights.len() != n {
        // same caps as the parallel entry point
        return crate::witness::alpha(graph, weights);
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).fold(0u64, |m, u| m | 1 << u))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let best = crate::witness::mis_serial(
        &adj,
        &weights.weights,
        all,
        crate::witness::DEFAULT_ALPHA_BUDGET,
    )?;
    let mut set: Vec<usize> = (0..n).filter(|&v| best.set >> v & 1 == 1).collect();
    set.sort_unstable();
    Ok(AlphaResult {
        value: best.value.max(0.0),
        set,
    })
}

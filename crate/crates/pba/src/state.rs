//! Probability assignments on algebras and on graphs.
//!
//! An algebra state sends `0` to zero, respects negation, and is modular on
//! compatible pairs. A graph state assigns vertex probabilities summing to
//! one on every maximal clique; a substate relaxes the sums to at most one.
//! For exclusive algebras the two pictures are in bijection: restriction to
//! the atoms and summation over atom decompositions invert each other.

use thiserror::Error;

use crate::algebra::PartialBooleanAlgebra;
use crate::graph::{AtomGraph, CliqueCover, GraphError};
use crate::lp::{self, LpStatus, Relation};

/// Tolerance for all state identities.
pub const STATE_TOL: f64 = 1e-9;

/// Cap on enumerated 0-1 states.
pub const ZERO_ONE_STATE_CAP: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum StateError {
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("the algebra must satisfy exclusivity for state transfer")]
    LepRequired,
    #[error("element `{0}` is not a join of atoms within any maximal context")]
    NotAtomSpanned(String),
    #[error("atom decompositions of `{element}` disagree by {spread:.3e}")]
    InconsistentDecomposition { element: String, spread: f64 },
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A state candidate violation: which condition broke and on which elements.
#[derive(Debug, Clone)]
pub struct StateViolation {
    pub condition: &'static str,
    pub elements: Vec<String>,
    pub detail: String,
}

/// Probability assignment on all elements of an algebra.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraState {
    pub values: Vec<f64>,
}

/// Probability assignment on graph vertices with unit clique sums.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphState {
    pub values: Vec<f64>,
}

/// Probability assignment on graph vertices with clique sums at most one.
#[derive(Debug, Clone, PartialEq)]
pub struct Substate {
    pub values: Vec<f64>,
}

/// Check the three state conditions exhaustively; returns every violation.
pub fn is_state(algebra: &PartialBooleanAlgebra, values: &[f64]) -> (bool, Vec<StateViolation>) {
    is_state_with_tol(algebra, values, STATE_TOL)
}

/// [`is_state`] with a caller-chosen tolerance.
pub fn is_state_with_tol(
    algebra: &PartialBooleanAlgebra,
    values: &[f64],
    tol: f64,
) -> (bool, Vec<StateViolation>) {
    let n = algebra.len();
    let mut violations = Vec::new();
    if values.len() != n {
        violations.push(StateViolation {
            condition: "domain",
            elements: vec![],
            detail: format!("{} values for {} elements", values.len(), n),
        });
        return (false, violations);
    }
    for (e, &v) in values.iter().enumerate() {
        if !(-tol..=1.0 + tol).contains(&v) {
            violations.push(StateViolation {
                condition: "range",
                elements: vec![algebra.label(e).to_string()],
                detail: format!("value {v} outside [0, 1]"),
            });
        }
    }
    if values[algebra.zero()].abs() > tol {
        violations.push(StateViolation {
            condition: "p(0)=0",
            elements: vec![algebra.label(algebra.zero()).to_string()],
            detail: format!("p(0) = {}", values[algebra.zero()]),
        });
    }
    for e in 0..n {
        let lhs = values[algebra.neg(e)];
        let rhs = 1.0 - values[e];
        if (lhs - rhs).abs() > tol {
            violations.push(StateViolation {
                condition: "p(~x)=1-p(x)",
                elements: vec![algebra.label(e).to_string()],
                detail: format!("p(~x) = {lhs}, 1 - p(x) = {rhs}"),
            });
        }
    }
    for x in 0..n {
        for y in x..n {
            if !algebra.compat(x, y) {
                continue;
            }
            if let (Some(m), Some(j)) = (algebra.meet(x, y), algebra.join(x, y)) {
                let lhs = values[j] + values[m];
                let rhs = values[x] + values[y];
                if (lhs - rhs).abs() > tol {
                    violations.push(StateViolation {
                        condition: "modularity",
                        elements: vec![algebra.label(x).to_string(), algebra.label(y).to_string()],
                        detail: format!("p(x∨y)+p(x∧y) = {lhs}, p(x)+p(y) = {rhs}"),
                    });
                }
            }
        }
    }
    (violations.is_empty(), violations)
}

impl AlgebraState {
    pub fn checked(
        algebra: &PartialBooleanAlgebra,
        values: Vec<f64>,
    ) -> Result<Self, Vec<StateViolation>> {
        let (ok, violations) = is_state(algebra, &values);
        if ok {
            Ok(AlgebraState { values })
        } else {
            Err(violations)
        }
    }

    /// Assemble a value vector from labeled entries; every element must be
    /// covered.
    pub fn from_labeled(
        algebra: &PartialBooleanAlgebra,
        labeled: &[(String, f64)],
    ) -> Result<Vec<f64>, StateError> {
        let mut values = vec![f64::NAN; algebra.len()];
        for (label, v) in labeled {
            let e = algebra
                .element(label)
                .ok_or_else(|| StateError::UnknownElement(label.clone()))?;
            values[e] = *v;
        }
        if let Some(missing) = values.iter().position(|v| v.is_nan()) {
            return Err(StateError::UnknownElement(format!(
                "no value for `{}`",
                algebra.label(missing)
            )));
        }
        Ok(values)
    }
}

impl GraphState {
    pub fn checked(graph: &AtomGraph, values: Vec<f64>) -> Result<Self, StateError> {
        Self::checked_with_tol(graph, values, STATE_TOL)
    }

    pub fn checked_with_tol(
        graph: &AtomGraph,
        values: Vec<f64>,
        tol: f64,
    ) -> Result<Self, StateError> {
        let cover = graph.maximal_cliques()?;
        check_clique_sums(graph, &cover, &values, true, tol)?;
        Ok(GraphState { values })
    }

    pub fn as_substate(&self) -> Substate {
        Substate {
            values: self.values.clone(),
        }
    }
}

impl Substate {
    pub fn checked(graph: &AtomGraph, values: Vec<f64>) -> Result<Self, StateError> {
        let cover = graph.maximal_cliques()?;
        check_clique_sums(graph, &cover, &values, false, STATE_TOL)?;
        Ok(Substate { values })
    }

    /// A substate whose clique sums all equal one is a graph state.
    pub fn into_state(self, graph: &AtomGraph) -> Result<GraphState, StateError> {
        GraphState::checked(graph, self.values)
    }
}

fn check_clique_sums(
    graph: &AtomGraph,
    cover: &CliqueCover,
    values: &[f64],
    exact: bool,
    tol: f64,
) -> Result<(), StateError> {
    if values.len() != graph.len() {
        return Err(StateError::UnknownElement(format!(
            "{} values for {} vertices",
            values.len(),
            graph.len()
        )));
    }
    if let Some(&v) = values.iter().find(|v| !(-tol..=1.0 + tol).contains(*v)) {
        return Err(StateError::SolverFailure(format!(
            "vertex value {v} outside [0, 1]"
        )));
    }
    for clique in &cover.cliques {
        let sum: f64 = clique.iter().map(|&v| values[v]).sum();
        let bad = if exact {
            (sum - 1.0).abs() > tol
        } else {
            sum > 1.0 + tol
        };
        if bad {
            return Err(StateError::SolverFailure(format!(
                "clique {{{}}} sums to {sum}",
                clique
                    .iter()
                    .map(|&v| graph.label(v))
                    .collect::<Vec<_>>()
                    .join(",")
            )));
        }
    }
    Ok(())
}

/// Restrict an algebra state to the atoms. Requires exclusivity; the result
/// is a graph state on [`PartialBooleanAlgebra::atom_graph`] (vertex `i` is
/// the `i`-th atom in ascending element order).
pub fn restrict_state(
    algebra: &PartialBooleanAlgebra,
    state: &AlgebraState,
) -> Result<GraphState, StateError> {
    if !algebra.satisfies_lep() {
        return Err(StateError::LepRequired);
    }
    let atoms = algebra.atoms();
    Ok(GraphState {
        values: atoms.iter().map(|&a| state.values[a]).collect(),
    })
}

/// Extend a graph state on the atom graph to the unique algebra state that
/// restricts to it: every element decomposes as a join of context atoms and
/// receives their value sum. All decompositions must agree within tolerance.
pub fn extend_state(
    algebra: &PartialBooleanAlgebra,
    graph_state: &GraphState,
) -> Result<AlgebraState, StateError> {
    if !algebra.satisfies_lep() {
        return Err(StateError::LepRequired);
    }
    let atoms = algebra.atoms();
    if graph_state.values.len() != atoms.len() {
        return Err(StateError::UnknownElement(format!(
            "{} vertex values for {} atoms",
            graph_state.values.len(),
            atoms.len()
        )));
    }
    let value_of_atom: std::collections::HashMap<usize, f64> = atoms
        .iter()
        .copied()
        .zip(graph_state.values.iter().copied())
        .collect();
    let contexts = algebra
        .maximal_contexts()
        .map_err(|e| StateError::CapExceeded(e.to_string()))?;

    let mut values = vec![0.0f64; algebra.len()];
    for (e, slot) in values.iter_mut().enumerate() {
        if e == algebra.zero() {
            continue;
        }
        let mut sums: Vec<f64> = Vec::new();
        for ctx in &contexts {
            if !ctx.members.contains(&e) {
                continue;
            }
            let ctx_atoms = algebra.context_atoms(ctx);
            let below: Vec<usize> = ctx_atoms
                .iter()
                .copied()
                .filter(|&a| algebra.leq(a, e))
                .collect();
            // the join of the collected atoms must reproduce e
            let mut joined = algebra.zero();
            for &a in &below {
                joined = match algebra.join(joined, a) {
                    Some(j) => j,
                    None => {
                        joined = algebra.zero();
                        break;
                    }
                };
            }
            if joined != e {
                continue;
            }
            match below
                .iter()
                .map(|a| value_of_atom.get(a))
                .sum::<Option<f64>>()
            {
                Some(s) => sums.push(s),
                None => continue, // a context atom that is not an algebra atom
            }
        }
        let Some(&first) = sums.first() else {
            return Err(StateError::NotAtomSpanned(algebra.label(e).to_string()));
        };
        let spread = sums.iter().fold(0.0f64, |m, &s| m.max((s - first).abs()));
        if spread > STATE_TOL {
            return Err(StateError::InconsistentDecomposition {
                element: algebra.label(e).to_string(),
                spread,
            });
        }
        *slot = first.clamp(0.0, 1.0);
    }
    Ok(AlgebraState { values })
}

/// All 0-1 graph states: vertex subsets meeting every maximal clique exactly
/// once. Exact backtracking over cliques, deterministic output order.
pub fn zero_one_states(graph: &AtomGraph) -> Result<Vec<GraphState>, StateError> {
    if graph.len() <= 64 {
        collect_states::<u64>(graph, independent_transversals(graph, ZERO_ONE_STATE_CAP)?)
    } else {
        collect_states::<WideSet>(graph, independent_transversals(graph, ZERO_ONE_STATE_CAP)?)
    }
}

/// Whether the graph admits no 0-1 state.
pub fn has_ks_property(graph: &AtomGraph) -> Result<bool, StateError> {
    if graph.len() <= 64 {
        Ok(independent_transversals::<u64>(graph, 1)?.is_empty())
    } else {
        Ok(independent_transversals::<WideSet>(graph, 1)?.is_empty())
    }
}

/// Sequential reference path with identical output.
pub(crate) fn zero_one_states_serial(graph: &AtomGraph) -> Result<Vec<GraphState>, StateError> {
    if graph.len() <= 64 {
        collect_states::<u64>(
            graph,
            independent_transversals_serial(graph, ZERO_ONE_STATE_CAP)?,
        )
    } else {
        collect_states::<WideSet>(
            graph,
            independent_transversals_serial(graph, ZERO_ONE_STATE_CAP)?,
        )
    }
}

fn collect_states<M: VertexSet>(
    graph: &AtomGraph,
    sets: Vec<M>,
) -> Result<Vec<GraphState>, StateError> {
    Ok(sets
        .into_iter()
        .map(|set| GraphState {
            values: (0..graph.len())
                .map(|v| if set.contains(v) { 1.0 } else { 0.0 })
                .collect(),
        })
        .collect())
}

/// Fixed-width vertex sets for the transversal search. Machine words cover
/// 64 vertices; the wide form covers the 512-vertex clique cap.
pub(crate) trait VertexSet: Copy + Eq + Send + Sync {
    fn empty() -> Self;
    fn insert(self, v: usize) -> Self;
    fn contains(&self, v: usize) -> bool;
    fn union(self, other: Self) -> Self;
    fn intersection(self, other: Self) -> Self;
    fn minus(self, other: Self) -> Self;
    fn is_empty(&self) -> bool;
    fn count(&self) -> u32;
    /// Lowest set vertex.
    fn first(&self) -> Option<usize>;
    fn remove(self, v: usize) -> Self;
    /// Order by ascending vertex lists.
    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering;
}

impl VertexSet for u64 {
    fn empty() -> Self {
        0
    }

    fn insert(self, v: usize) -> Self {
        self | 1 << v
    }

    fn contains(&self, v: usize) -> bool {
        self >> v & 1 == 1
    }

    fn union(self, other: Self) -> Self {
        self | other
    }

    fn intersection(self, other: Self) -> Self {
        self & other
    }

    fn minus(self, other: Self) -> Self {
        self & !other
    }

    fn is_empty(&self) -> bool {
        *self == 0
    }

    fn count(&self) -> u32 {
        self.count_ones()
    }

    fn first(&self) -> Option<usize> {
        (*self != 0).then(|| self.trailing_zeros() as usize)
    }

    fn remove(self, v: usize) -> Self {
        self & !(1 << v)
    }

    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        set_lex_cmp(*self, *other)
    }
}

#[derive(Debug, Copy, Clone, PartialEq, Eq)]
pub(crate) struct WideSet([u64; 8]);

impl VertexSet for WideSet {
    fn empty() -> Self {
        WideSet([0; 8])
    }

    fn insert(mut self, v: usize) -> Self {
        self.0[v / 64] |= 1 << (v % 64);
        self
    }

    fn contains(&self, v: usize) -> bool {
        self.0[v / 64] >> (v % 64) & 1 == 1
    }

    fn union(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a |= b;
        }
        self
    }

    fn intersection(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a &= b;
        }
        self
    }

    fn minus(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a &= !b;
        }
        self
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn count(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    fn first(&self) -> Option<usize> {
        self.0
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(b, &w)| b * 64 + w.trailing_zeros() as usize)
    }

    fn remove(mut self, v: usize) -> Self {
        self.0[v / 64] &= !(1 << (v % 64));
        self
    }

    fn lex_cmp(&self, other: &Self) -> std::cmp::Ordering {
        let (mut a, mut b) = (*self, *other);
        loop {
            match (a.first(), b.first()) {
                (None, None) => return std::cmp::Ordering::Equal,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (Some(x), Some(y)) => match x.cmp(&y) {
                    std::cmp::Ordering::Equal => {
                        a = a.remove(x);
                        b = b.remove(y);
                    }
                    other => return other,
                },
            }
        }
    }
}

struct TransversalInput<M> {
    cliques: Vec<M>,
    neighbor_masks: Vec<M>,
}

fn transversal_input<M: VertexSet>(graph: &AtomGraph) -> Result<TransversalInput<M>, StateError> {
    if graph.len() > 512 {
        return Err(StateError::CapExceeded(
            "0-1 state enumeration capped at 512 vertices".to_string(),
        ));
    }
    let cover = graph.maximal_cliques()?;
    Ok(TransversalInput {
        cliques: cover
            .cliques
            .iter()
            .map(|c| c.iter().fold(M::empty(), |m, &v| m.insert(v)))
            .collect(),
        neighbor_masks: (0..graph.len())
            .map(|v| graph.neighbors(v).fold(M::empty(), |m, u| m.insert(u)))
            .collect(),
    })
}

/// Vertex sets hitting each maximal clique exactly once, sorted by ascending
/// vertex lists. `limit = 1` asks only for existence.
fn independent_transversals<M: VertexSet>(
    graph: &AtomGraph,
    limit: usize,
) -> Result<Vec<M>, StateError> {
    let input = transversal_input::<M>(graph)?;
    let TransversalInput {
        cliques,
        neighbor_masks,
    } = &input;

    // Expand a frame per partial choice over the first cliques, then explore
    // each frame independently.
    let mut frames: Vec<(usize, M, M)> = vec![(0, M::empty(), M::empty())];
    #[cfg(feature = "parallel")]
    let target = rayon::current_num_threads().max(1) * 4;
    #[cfg(not(feature = "parallel"))]
    let target = 1usize;
    while frames.len() < target {
        let mut next = Vec::with_capacity(frames.len() * 3);
        let mut grew = false;
        for (depth, selected, blocked) in frames.iter().copied() {
            let Some(&clique) = cliques.get(depth) else {
                next.push((depth, selected, blocked));
                continue;
            };
            grew = true;
            let hits = clique.intersection(selected);
            if hits.count() == 1 {
                next.push((depth + 1, selected, blocked));
                continue;
            }
            if !hits.is_empty() {
                continue; // inconsistent partial choice
            }
            let mut candidates = clique.minus(blocked);
            while let Some(v) = candidates.first() {
                candidates = candidates.remove(v);
                next.push((
                    depth + 1,
                    selected.insert(v),
                    blocked.union(neighbor_masks[v]),
                ));
            }
        }
        frames = next;
        if !grew || frames.is_empty() {
            break;
        }
    }

    let results = crate::exec::flat_map(frames, |(depth, selected, blocked)| {
        let mut out = Vec::new();
        let mut overflow = false;
        fill_transversal(
            cliques,
            neighbor_masks,
            depth,
            selected,
            blocked,
            limit,
            &mut out,
            &mut overflow,
        );
        if overflow {
            vec![Err(())]
        } else {
            out.into_iter().map(Ok).collect()
        }
    });
    let mut sets = Vec::with_capacity(results.len());
    for r in results {
        match r {
            Ok(s) => sets.push(s),
            Err(()) => {
                return Err(StateError::CapExceeded(format!(
                    "more than {ZERO_ONE_STATE_CAP} 0-1 states"
                )))
            }
        }
    }
    finish_transversals(sets, limit)
}

/// Root-only recursion for the sequential reference path.
fn independent_transversals_serial<M: VertexSet>(
    graph: &AtomGraph,
    limit: usize,
) -> Result<Vec<M>, StateError> {
    let input = transversal_input::<M>(graph)?;
    let mut out = Vec::new();
    let mut overflow = false;
    fill_transversal(
        &input.cliques,
        &input.neighbor_masks,
        0,
        M::empty(),
        M::empty(),
        limit,
        &mut out,
        &mut overflow,
    );
    if overflow {
        return Err(StateError::CapExceeded(format!(
            "more than {ZERO_ONE_STATE_CAP} 0-1 states"
        )));
    }
    finish_transversals(out, limit)
}

fn finish_transversals<M: VertexSet>(mut sets: Vec<M>, limit: usize) -> Result<Vec<M>, StateError> {
    sets.sort_unstable_by(|a, b| a.lex_cmp(b));
    sets.dedup();
    if sets.len() > limit {
        if limit == 1 {
            sets.truncate(1); // existence query
        } else {
            return Err(StateError::CapExceeded(format!(
                "more than {ZERO_ONE_STATE_CAP} 0-1 states"
            )));
        }
    }
    Ok(sets)
}

#[allow(clippy::too_many_arguments)]
fn fill_transversal<M: VertexSet>(
    cliques: &[M],
    neighbor_masks: &[M],
    next: usize,
    selected: M,
    blocked: M,
    limit: usize,
    out: &mut Vec<M>,
    overflow: &mut bool,
) {
    if *overflow || (limit == 1 && !out.is_empty()) {
        return;
    }
    let Some(&clique) = cliques.get(next) else {
        out.push(selected);
        if out.len() > limit {
            *overflow = true;
        }
        return;
    };
    let hits = clique.intersection(selected);
    if hits.count() == 1 {
        fill_transversal(
            cliques,
            neighbor_masks,
            next + 1,
            selected,
            blocked,
            limit,
            out,
            overflow,
        );
        return;
    }
    if !hits.is_empty() {
        return; // two selected vertices share a clique
    }
    let mut candidates = clique.minus(blocked);
    while let Some(v) = candidates.first() {
        candidates = candidates.remove(v);
        fill_transversal(
            cliques,
            neighbor_masks,
            next + 1,
            selected.insert(v),
            blocked.union(neighbor_masks[v]),
            limit,
            out,
            overflow,
        );
        if *overflow || (limit == 1 && !out.is_empty()) {
            return;
        }
    }
}

/// Lexicographic order on vertex sets by their ascending element lists.
pub(crate) fn set_lex_cmp(mut a: u64, mut b: u64) -> std::cmp::Ordering {
    use std::cmp::Ordering;
    while a != 0 && b != 0 {
        let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
        match la.cmp(&lb) {
            Ordering::Equal => {
                a &= a - 1;
                b &= b - 1;
            }
            other => return other,
        }
    }
    match (a, b) {
        (0, 0) => Ordering::Equal,
        (0, _) => Ordering::Less,
        _ => Ordering::Greater,
    }
}

/// A point of the polytope `{p ≥ 0, clique sums = 1}` when one exists,
/// pushed toward the interior by maximizing the minimum vertex value.
pub fn state_feasible(graph: &AtomGraph) -> Result<Option<GraphState>, StateError> {
    let n = graph.len();
    if n == 0 {
        return Ok(Some(GraphState { values: vec![] }));
    }
    let cover = graph.maximal_cliques()?;
    // variables p_0..p_{n-1}, t; maximize t subject to p_v - t ≥ 0
    let mut rows = Vec::new();
    for clique in &cover.cliques {
        let mut coeffs = vec![0.0; n + 1];
        for &v in clique {
            coeffs[v] = 1.0;
        }
        rows.push((coeffs, Relation::Eq, 1.0));
    }
    for v in 0..n {
        let mut coeffs = vec![0.0; n + 1];
        coeffs[v] = 1.0;
        coeffs[n] = -1.0;
        rows.push((coeffs, Relation::Ge, 0.0));
    }
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let solution =
        lp::maximize(&objective, &rows).map_err(|e| StateError::SolverFailure(e.to_string()))?;
    match solution.status {
        LpStatus::Infeasible => Ok(None),
        LpStatus::Unbounded => Err(StateError::SolverFailure(
            "feasibility program cannot be unbounded".to_string(),
        )),
        LpStatus::Optimal => {
            let values: Vec<f64> = solution.x[..n].iter().map(|&v| v.clamp(0.0, 1.0)).collect();
            Ok(Some(GraphState { values }))
        }
    }
}

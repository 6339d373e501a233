//! Graph-based contextuality witnesses: the exact weighted independence
//! number, the weighted Lovász number by semidefinite programming, and the
//! weighted fractional packing number by linear programming, together with
//! the inequality report comparing them.

use nalgebra::DMatrix;
use thiserror::Error;

use crate::graph::{AtomGraph, GraphError};
use crate::lp::{self, LpStatus, Relation};
use crate::sdp::{self, SdpOptions, TraceEdgeSdp};
use crate::state::set_lex_cmp;

/// Vertex cap for the exact searches and the semidefinite program.
pub const WITNESS_VERTEX_CAP: usize = 64;
/// Node budget for the independence-number search.
pub const DEFAULT_ALPHA_BUDGET: u64 = 200_000_000;
/// Gap below which two witness values count as equal; chosen above solver
/// error so violation flags cannot fire on numerics.
pub const WITNESS_GAP_TOL: f64 = 1e-4;

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("search budget exceeded after {0} nodes")]
    SearchBudgetExceeded(u64),
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("weights must be nonnegative with at least one positive entry")]
    InvalidWeights,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Nonnegative vertex weights; defaults to all ones.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction {
    pub weights: Vec<f64>,
}

impl WeightFunction {
    pub fn ones(n: usize) -> Self {
        WeightFunction {
            weights: vec![1.0; n],
        }
    }

    pub fn new(weights: Vec<f64>) -> Result<Self, WitnessError> {
        if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
            return Err(WitnessError::InvalidWeights);
        }
        Ok(WeightFunction { weights })
    }
}

/// Exact weighted independence number with a maximizing set.
#[derive(Debug, Clone)]
pub struct AlphaResult {
    pub value: f64,
    /// Lexicographically least maximizing independent set.
    pub set: Vec<usize>,
}

/// Weighted Lovász number with its certified primal-dual bracket.
#[derive(Debug, Clone)]
pub struct ThetaResult {
    /// Midpoint of `[lower, upper]`.
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub gap: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

/// Weighted fractional packing number with an optimal point.
#[derive(Debug, Clone)]
pub struct AlphaStarResult {
    pub value: f64,
    pub x: Vec<f64>,
}

/// All three numbers with the noncontextuality-gap verdict.
#[derive(Debug, Clone)]
pub struct WitnessReport {
    pub alpha: AlphaResult,
    pub theta: ThetaResult,
    pub alpha_star: AlphaStarResult,
    /// Set iff `alpha < theta - 1e-4`.
    pub gap_found: bool,
}

fn check_caps(graph: &AtomGraph, weights: &WeightFunction) -> Result<(), WitnessError> {
    if graph.len() > WITNESS_VERTEX_CAP {
        return Err(WitnessError::CapExceeded(format!(
            "witness computations capped at {WITNESS_VERTEX_CAP} vertices"
        )));
    }
    if weights.weights.len() != graph.len() {
        return Err(WitnessError::InvalidWeights);
    }
    if weights.weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(WitnessError::InvalidWeights);
    }
    Ok(())
}

/// Exact maximum of `Σ w(v)` over independent sets, branch and bound with a
/// greedy weighted clique-cover bound. Ties break to the lexicographically
/// least vertex set.
pub fn alpha(graph: &AtomGraph, weights: &WeightFunction) -> Result<AlphaResult, WitnessError> {
    alpha_budgeted(graph, weights, DEFAULT_ALPHA_BUDGET)
}

pub fn alpha_budgeted(
    graph: &AtomGraph,
    weights: &WeightFunction,
    budget: u64,
) -> Result<AlphaResult, WitnessError> {
    check_caps(graph, weights)?;
    let n = graph.len();
    if n == 0 {
        return Ok(AlphaResult {
            value: 0.0,
            set: vec![],
        });
    }
    let adj: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).fold(0u64, |m, u| m | 1 << u))
        .collect();
    let all = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };

    #[cfg(feature = "parallel")]
    let best = mis_parallel(&adj, &weights.weights, all, budget)?;
    #[cfg(not(feature = "parallel"))]
    let best = mis_serial(&adj, &weights.weights, all, budget)?;

    let mut set: Vec<usize> = (0..n).filter(|&v| best.set >> v & 1 == 1).collect();
    set.sort_unstable();
    Ok(AlphaResult {
        value: best.value.max(0.0),
        set,
    })
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Incumbent {
    pub value: f64,
    pub set: u64,
}

/// Single-threaded exact search from the root frame.
pub(crate) fn mis_serial(
    adj: &[u64],
    w: &[f64],
    all: u64,
    budget: u64,
) -> Result<Incumbent, WitnessError> {
    let shared = SharedBound::new();
    let counter = std::sync::atomic::AtomicU64::new(0);
    let mut nodes = NodeBudget::new(&counter, budget);
    let mut best = Incumbent {
        value: f64::NEG_INFINITY,
        set: 0,
    };
    branch(adj, w, all, 0.0, 0, &shared, &mut best, &mut nodes, budget)?;
    if nodes.exhausted() {
        return Err(WitnessError::SearchBudgetExceeded(budget));
    }
    Ok(best)
}

/// Root-split search: expand the branch tree into independent frames, solve
/// each exactly, prune through a shared monotone bound, merge
/// deterministically. The result never depends on thread timing because
/// pruning is strict and optimal leaves survive in their frames.
#[cfg(feature = "parallel")]
pub(crate) fn mis_parallel(
    adj: &[u64],
    w: &[f64],
    all: u64,
    budget: u64,
) -> Result<Incumbent, WitnessError> {
    use rayon::prelude::*;

    let target = rayon::current_num_threads().max(1) * 8;
    let mut frames: Vec<(u64, f64, u64)> = vec![(all, 0.0, 0)];
    for _ in 0..16 {
        if frames.len() >= target {
            break;
        }
        let mut next = Vec::with_capacity(frames.len() * 2);
        let mut grew = false;
        for (cand, current, set) in frames {
            if cand == 0 {
                next.push((cand, current, set));
                continue;
            }
            let v = heaviest(w, cand);
            next.push((cand & !adj[v] & !(1u64 << v), current + w[v], set | 1 << v));
            next.push((cand & !(1u64 << v), current, set));
            grew = true;
        }
        frames = next;
        if !grew {
            break;
        }
    }

    let shared = SharedBound::new();
    let counter = std::sync::atomic::AtomicU64::new(0);
    let locals: Vec<Result<Incumbent, WitnessError>> = frames
        .into_par_iter()
        .map(|(cand, current, set)| {
            let mut best = Incumbent {
                value: f64::NEG_INFINITY,
                set: 0,
            };
            let mut nodes = NodeBudget::new(&counter, budget);
            branch(
                adj, w, cand, current, set, &shared, &mut best, &mut nodes, budget,
            )?;
            if nodes.exhausted() {
                return Err(WitnessError::SearchBudgetExceeded(budget));
            }
            Ok(best)
        })
        .collect();

    let mut best = Incumbent {
        value: f64::NEG_INFINITY,
        set: 0,
    };
    for local in locals {
        let local = local?;
        if local.value > best.value
            || (local.value == best.value
                && set_lex_cmp(local.set, best.set) == std::cmp::Ordering::Less)
        {
            best = local;
        }
    }
    Ok(best)
}

fn heaviest(w: &[f64], cand: u64) -> usize {
    let mut v = usize::MAX;
    let mut vw = f64::NEG_INFINITY;
    let mut scan = cand;
    while scan != 0 {
        let u = scan.trailing_zeros() as usize;
        scan &= scan - 1;
        if w[u] > vw {
            vw = w[u];
            v = u;
        }
    }
    v
}

/// Monotone nonnegative f64 lower bound shared between branches. Positive
/// IEEE doubles order like their bit patterns, so `fetch_max` works.
pub(crate) struct SharedBound(std::sync::atomic::AtomicU64);

impl SharedBound {
    pub fn new() -> Self {
        SharedBound(std::sync::atomic::AtomicU64::new(0))
    }

    pub fn get(&self) -> f64 {
        f64::from_bits(self.0.load(std::sync::atomic::Ordering::Relaxed))
    }

    pub fn raise(&self, value: f64) {
        if value > 0.0 {
            self.0
                .fetch_max(value.to_bits(), std::sync::atomic::Ordering::Relaxed);
        }
    }
}

/// Greedy weighted clique cover of the candidate set; the sum of per-clique
/// maxima bounds any independent subset from above.
fn cover_bound(adj: &[u64], w: &[f64], mut cand: u64) -> f64 {
    let mut bound = 0.0;
    while cand != 0 {
        // heaviest remaining vertex leads a clique
        let mut lead = usize::MAX;
        let mut lead_w = f64::NEG_INFINITY;
        let mut scan = cand;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            if w[v] > lead_w {
                lead_w = w[v];
                lead = v;
            }
        }
        bound += lead_w;
        let mut pool = cand & adj[lead] & !(1u64 << lead);
        cand &= !(1u64 << lead);
        while pool != 0 {
            // next heaviest vertex adjacent to the whole clique so far
            let mut pick = usize::MAX;
            let mut pick_w = f64::NEG_INFINITY;
            let mut scan = pool;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                if w[v] > pick_w {
                    pick_w = w[v];
                    pick = v;
                }
            }
            cand &= !(1u64 << pick);
            pool &= adj[pick] & !(1u64 << pick);
        }
    }
    bound
}

/// Shared node budget, synced in batches to keep the hot path off the
/// atomic.
pub(crate) struct NodeBudget<'a> {
    shared: &'a std::sync::atomic::AtomicU64,
    local: u32,
    budget: u64,
}

impl<'a> NodeBudget<'a> {
    const BATCH: u32 = 1024;

    pub fn new(shared: &'a std::sync::atomic::AtomicU64, budget: u64) -> Self {
        NodeBudget {
            shared,
            local: 0,
            budget,
        }
    }

    #[inline]
    fn tick(&mut self) -> bool {
        self.local += 1;
        if self.local == Self::BATCH {
            self.local = 0;
            let seen = self
                .shared
                .fetch_add(Self::BATCH as u64, std::sync::atomic::Ordering::Relaxed);
            return seen < self.budget;
        }
        true
    }

    /// Flush the residue and report whether the cumulative count is over
    /// budget. Called when a search frame completes.
    fn exhausted(&mut self) -> bool {
        let residue = std::mem::take(&mut self.local) as u64;
        let seen = self
            .shared
            .fetch_add(residue, std::sync::atomic::Ordering::Relaxed);
        seen + residue > self.budget
    }
}

#[allow(clippy::too_many_arguments)]
fn branch(
    adj: &[u64],
    w: &[f64],
    cand: u64,
    current: f64,
    current_set: u64,
    shared: &SharedBound,
    best: &mut Incumbent,
    nodes: &mut NodeBudget,
    budget: u64,
) -> Result<(), WitnessError> {
    if !nodes.tick() {
        return Err(WitnessError::SearchBudgetExceeded(budget));
    }
    if cand == 0 {
        consider(best, shared, current, current_set);
        return Ok(());
    }
    // prune strictly: branches tying the incumbent still finish, so the
    // lexicographic tie-break sees every optimal set
    if current + cover_bound(adj, w, cand) < shared.get().max(best.value) {
        return Ok(());
    }
    let v = heaviest(w, cand);
    // include v
    branch(
        adj,
        w,
        cand & !adj[v] & !(1u64 << v),
        current + w[v],
        current_set | 1 << v,
        shared,
        best,
        nodes,
        budget,
    )?;
    // exclude v
    branch(
        adj,
        w,
        cand & !(1u64 << v),
        current,
        current_set,
        shared,
        best,
        nodes,
        budget,
    )
}

fn consider(best: &mut Incumbent, shared: &SharedBound, value: f64, set: u64) {
    let better = value > best.value
        || (value == best.value && set_lex_cmp(set, best.set) == std::cmp::Ordering::Less);
    if better {
        best.value = value;
        best.set = set;
        shared.raise(value);
    }
}

/// Weighted Lovász number: maximize `Σ √(w_i w_j) X_ij` over unit-trace
/// positive semidefinite matrices vanishing on edges. Returns the certified
/// primal-dual bracket.
pub fn theta(graph: &AtomGraph, weights: &WeightFunction) -> Result<ThetaResult, WitnessError> {
    check_caps(graph, weights)?;
    let n = graph.len();
    if n == 0 {
        return Ok(ThetaResult {
            value: 0.0,
            lower: 0.0,
            upper: 0.0,
            gap: 0.0,
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
        });
    }
    if !weights.weights.iter().any(|&w| w > 0.0) {
        return Err(WitnessError::InvalidWeights);
    }
    let sq: Vec<f64> = weights.weights.iter().map(|&w| w.sqrt()).collect();
    let mut c = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] = -sq[i] * sq[j];
        }
    }
    let problem = TraceEdgeSdp {
        c,
        edges: graph.edges(),
        trace: 1.0,
    };
    let scale = weights.weights.iter().cloned().fold(1.0f64, f64::max);
    let options = SdpOptions {
        max_iterations: 200,
        gap_tolerance: (1e-7 * scale).min(1e-6),
    };
    let solution =
        sdp::solve(&problem, options).map_err(|e| WitnessError::SolverFailure(e.to_string()))?;
    let lower = -solution.primal_objective;
    let upper = -solution.dual_objective;
    Ok(ThetaResult {
        value: 0.5 * (lower + upper),
        lower,
        upper,
        gap: solution.gap,
        iterations: solution.iterations,
        primal_residual: solution.primal_residual,
        dual_residual: solution.dual_residual,
    })
}

/// Weighted fractional packing number: maximize `Σ w_i x_i` with `Σ_{i∈C} x_i
/// ≤ 1` on every maximal clique and `0 ≤ x ≤ 1`. Maximal cliques dominate all
/// clique constraints, and they cover every vertex, so no explicit upper
/// bounds are needed.
pub fn alpha_star(
    graph: &AtomGraph,
    weights: &WeightFunction,
) -> Result<AlphaStarResult, WitnessError> {
    check_caps(graph, weights)?;
    let n = graph.len();
    if n == 0 {
        return Ok(AlphaStarResult {
            value: 0.0,
            x: vec![],
        });
    }
    let cover = graph.maximal_cliques()?;
    let rows: Vec<(Vec<f64>, Relation, f64)> = cover
        .cliques
        .iter()
        .map(|clique| {
            let mut coeffs = vec![0.0; n];
            for &v in clique {
                coeffs[v] = 1.0;
            }
            (coeffs, Relation::Le, 1.0)
        })
        .collect();
    let solution = lp::maximize(&weights.weights, &rows)
        .map_err(|e| WitnessError::SolverFailure(e.to_string()))?;
    match solution.status {
        LpStatus::Optimal => Ok(AlphaStarResult {
            value: solution.objective,
            x: solution.x,
        }),
        other => Err(WitnessError::SolverFailure(format!(
            "packing program ended {other:?}"
        ))),
    }
}

/// Assemble all three witnesses and flag a noncontextuality gap when the
/// independence number falls short of the Lovász number.
pub fn nc_inequality_report(
    graph: &AtomGraph,
    weights: &WeightFunction,
) -> Result<WitnessReport, WitnessError> {
    let alpha = alpha(graph, weights)?;
    let theta = theta(graph, weights)?;
    let alpha_star = alpha_star(graph, weights)?;
    if alpha.value > theta.value + WITNESS_GAP_TOL
        || theta.value > alpha_star.value + WITNESS_GAP_TOL
    {
        return Err(WitnessError::SolverFailure(format!(
            "sandwich ordering violated: {} / {} / {}",
            alpha.value, theta.value, alpha_star.value
        )));
    }
    let gap_found = alpha.value < theta.value - WITNESS_GAP_TOL;
    Ok(WitnessReport {
        alpha,
        theta,
        alpha_star,
        gap_found,
    })
}

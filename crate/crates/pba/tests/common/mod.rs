//! Independent oracles for the integration suites: exhaustive enumeration
//! for independence numbers, maximal cliques and 0-1 states, and an exact
//! rational simplex for packing and feasibility programs. These never call
//! into the paths they check.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use pba::witness::WeightFunction;
use pba::AtomGraph;

/// Exhaustive weighted independence number with the lexicographically least
/// maximizing set. Scans all subsets; keep `n` small.
pub fn brute_force_alpha(graph: &AtomGraph, weights: &WeightFunction) -> (f64, Vec<usize>) {
    let n = graph.len();
    assert!(n <= 20, "oracle explores 2^n subsets");
    let adj: Vec<u64> = (0..n)
        .map(|v| graph.neighbors(v).fold(0u64, |m, u| m | 1 << u))
        .collect();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_set = 0u64;
    for set in 0..(1u64 << n) {
        let mut independent = true;
        let mut scan = set;
        while scan != 0 {
            let v = scan.trailing_zeros() as usize;
            scan &= scan - 1;
            if adj[v] & set != 0 {
                independent = false;
                break;
            }
        }
        if !independent {
            continue;
        }
        let value: f64 = (0..n)
            .filter(|&v| set >> v & 1 == 1)
            .map(|v| weights.weights[v])
            .sum();
        if value > best_value || (value == best_value && mask_lex_less(set, best_set)) {
            best_value = value;
            best_set = set;
        }
    }
    let set: Vec<usize> = (0..n).filter(|&v| best_set >> v & 1 == 1).collect();
    (best_value.max(0.0), set)
}

/// Ascending-list lexicographic comparison of vertex masks.
fn mask_lex_less(mut a: u64, mut b: u64) -> bool {
    while a != 0 && b != 0 {
        let (la, lb) = (a.trailing_zeros(), b.trailing_zeros());
        if la != lb {
            return la < lb;
        }
        a &= a - 1;
        b &= b - 1;
    }
    a == 0 && b != 0
}

/// All maximal cliques by scanning every subset; sorted like the library
/// output.
pub fn brute_force_maximal_cliques(graph: &AtomGraph) -> Vec<Vec<usize>> {
    let n = graph.len();
    assert!(n <= 16, "oracle explores 2^n subsets");
    let is_clique = |set: u64| -> bool {
        for i in 0..n {
            if set >> i & 1 == 0 {
                continue;
            }
            for j in i + 1..n {
                if set >> j & 1 == 1 && !graph.adjacent(i, j) {
                    return false;
                }
            }
        }
        true
    };
    let mut cliques = Vec::new();
    for set in 1u64..(1 << n) {
        if !is_clique(set) {
            continue;
        }
        let extendable = (0..n).any(|v| set >> v & 1 == 0 && is_clique(set | 1 << v));
        if !extendable {
            cliques.push((0..n).filter(|&v| set >> v & 1 == 1).collect::<Vec<_>>());
        }
    }
    cliques.sort();
    cliques
}

/// Count of 0-1 states by scanning every subset against the brute-force
/// clique cover.
pub fn brute_force_zero_one_count(graph: &AtomGraph) -> usize {
    let n = graph.len();
    assert!(n <= 16);
    let cliques = brute_force_maximal_cliques(graph);
    let masks: Vec<u64> = cliques
        .iter()
        .map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v))
        .collect();
    (0u64..(1 << n))
        .filter(|set| masks.iter().all(|m| (m & set).count_ones() == 1))
        .count()
}

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

/// Rational from a float that is exactly representable in small binary
/// (weights used by the oracle comparisons are constructed that way).
pub fn q_from_f64(x: f64) -> Q {
    BigRational::from_float(x).expect("finite float")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RationalLp {
    Optimal { objective: Q, x: Vec<Q> },
    Infeasible,
    Unbounded,
}

/// Exact two-phase simplex with Bland's rule over big rationals:
/// maximize `c·x` subject to the rows and `x ≥ 0`.
pub fn rational_lp_max(c: &[Q], rows: &[(Vec<Q>, Rel, Q)]) -> RationalLp {
    let n = c.len();
    let m = rows.len();
    for (coeffs, _, rhs) in rows {
        assert_eq!(coeffs.len(), n);
        assert!(
            !rhs.is_negative(),
            "oracle expects nonnegative right-hand sides"
        );
    }
    let n_slack = rows.iter().filter(|(_, r, _)| *r == Rel::Le).count();
    let n_art = rows.iter().filter(|(_, r, _)| *r == Rel::Eq).count();
    let cols = n + n_slack + n_art;

    let mut tab: Vec<Vec<Q>> = vec![vec![Q::zero(); cols + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut art_cols = Vec::new();
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, (coeffs, rel, rhs)) in rows.iter().enumerate() {
        for (j, v) in coeffs.iter().enumerate() {
            tab[i][j] = v.clone();
        }
        tab[i][cols] = rhs.clone();
        match rel {
            Rel::Le => {
                tab[i][next_slack] = Q::one();
                basis[i] = next_slack;
                next_slack += 1;
            }
            Rel::Eq => {
                tab[i][next_art] = Q::one();
                basis[i] = next_art;
                art_cols.push(next_art);
                next_art += 1;
            }
        }
    }

    fn pivot(tab: &mut [Vec<Q>], basis: &mut [usize], obj: &mut [Q], row: usize, col: usize) {
        let div = tab[row][col].clone();
        for v in tab[row].iter_mut() {
            *v /= div.clone();
        }
        let pivot_row = std::mem::take(&mut tab[row]);
        for (i, other) in tab.iter_mut().enumerate() {
            if i != row && !other[col].is_zero() {
                let f = other[col].clone();
                for (t, pv) in other.iter_mut().zip(&pivot_row) {
                    let d = &f * pv;
                    *t -= d;
                }
            }
        }
        if !obj[col].is_zero() {
            let f = obj[col].clone();
            for (t, pv) in obj.iter_mut().zip(&pivot_row) {
                let d = &f * pv;
                *t -= d;
            }
        }
        tab[row] = pivot_row;
        basis[row] = col;
    }

    // objective row stores z_j - c_j; entering columns are the negative ones
    fn run(
        tab: &mut [Vec<Q>],
        basis: &mut [usize],
        obj: &mut [Q],
        allowed: &dyn Fn(usize) -> bool,
    ) -> bool {
        let cols = tab[0].len() - 1;
        loop {
            let entering = (0..cols).find(|&j| allowed(j) && obj[j].is_negative());
            let Some(e) = entering else {
                return true;
            };
            let mut leave: Option<usize> = None;
            for i in 0..tab.len() {
                if tab[i][e].is_positive() {
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let cur = &tab[i][cols] / &tab[i][e];
                            let prev = &tab[l][cols] / &tab[l][e];
                            cur < prev || (cur == prev && basis[i] < basis[l])
                        }
                    };
                    if better {
                        leave = Some(i);
                    }
                }
            }
            let Some(l) = leave else {
                return false; // unbounded
            };
            pivot(tab, basis, obj, l, e);
        }
    }

    if !art_cols.is_empty() {
        let mut obj = vec![Q::zero(); cols + 1];
        for &a in &art_cols {
            obj[a] = Q::one();
        }
        for (i, &b) in basis.iter().enumerate() {
            if art_cols.contains(&b) {
                for j in 0..=cols {
                    let d = tab[i][j].clone();
                    obj[j] -= d;
                }
            }
        }
        let ok = run(&mut tab, &mut basis, &mut obj, &|_| true);
        assert!(ok, "phase one cannot be unbounded");
        if obj[cols].is_negative() {
            return RationalLp::Infeasible;
        }
        for i in 0..m {
            if art_cols.contains(&basis[i]) {
                if let Some(j) = (0..n + n_slack).find(|&j| !tab[i][j].is_zero()) {
                    pivot(&mut tab, &mut basis, &mut obj, i, j);
                }
            }
        }
    }

    let mut obj = vec![Q::zero(); cols + 1];
    for j in 0..n {
        obj[j] = -c[j].clone();
    }
    for (i, &b) in basis.iter().enumerate() {
        if !obj[b].is_zero() {
            let f = obj[b].clone();
            for j in 0..=cols {
                let d = &f * &tab[i][j];
                obj[j] -= d;
            }
        }
    }
    let art_cols_ref = art_cols.clone();
    let allowed = move |j: usize| !art_cols_ref.contains(&j);
    if !run(&mut tab, &mut basis, &mut obj, &allowed) {
        return RationalLp::Unbounded;
    }

    let mut x = vec![Q::zero(); n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i][cols].clone();
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    RationalLp::Optimal { objective, x }
}

/// Exact fractional packing number over the maximal cliques of the graph.
pub fn rational_alpha_star(graph: &AtomGraph, weights: &[Q]) -> Q {
    let n = graph.len();
    let cliques = brute_force_maximal_cliques(graph);
    let rows: Vec<(Vec<Q>, Rel, Q)> = cliques
        .iter()
        .map(|clique| {
            let mut coeffs = vec![Q::zero(); n];
            for &v in clique {
                coeffs[v] = Q::one();
            }
            (coeffs, Rel::Le, Q::one())
        })
        .collect();
    match rational_lp_max(weights, &rows) {
        RationalLp::Optimal { objective, .. } => objective,
        other => panic!("packing oracle ended {other:?}"),
    }
}

/// Exact feasibility of `{p ≥ 0, clique sums = 1}`.
pub fn rational_state_feasible(graph: &AtomGraph) -> bool {
    let cliques = brute_force_maximal_cliques(graph);
    rational_state_feasible_with_cliques(graph.len(), &cliques)
}

/// Same check against a caller-supplied clique list (for graphs too large
/// for the subset scan, where the cover is known by construction).
pub fn rational_state_feasible_with_cliques(n: usize, cliques: &[Vec<usize>]) -> bool {
    let rows: Vec<(Vec<Q>, Rel, Q)> = cliques
        .iter()
        .map(|clique| {
            let mut coeffs = vec![Q::zero(); n];
            for &v in clique {
                coeffs[v] = Q::one();
            }
            (coeffs, Rel::Eq, Q::one())
        })
        .collect();
    let zeros = vec![Q::zero(); n];
    !matches!(rational_lp_max(&zeros, &rows), RationalLp::Infeasible)
}

pub fn rational_to_f64(x: &Q) -> f64 {
    let numer = x.numer();
    let denom = x.denom();
    let nf = bigint_to_f64(numer);
    let df = bigint_to_f64(denom);
    nf / df
}

fn bigint_to_f64(x: &BigInt) -> f64 {
    let s = x.to_string();
    s.parse::<f64>().expect("decimal digits")
}

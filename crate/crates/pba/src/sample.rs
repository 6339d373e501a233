//! Seeded random instances for property tests and benchmarks: small glued
//! algebras, graphs, graph states, weights and density matrices.

use num_complex::Complex64;
use rand::Rng;

use crate::algebra::{PartialBooleanAlgebra, RawAlgebra};
use crate::builder::Amalgam;
use crate::graph::AtomGraph;
use crate::quantum::{CMatrix, DensityMatrix};
use crate::state::{state_feasible, zero_one_states, GraphState};
use crate::witness::WeightFunction;

/// Deterministic generator for the seeded entry points.
pub fn rng_from_seed(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// A random validated algebra with at most twelve elements: a powerset, a
/// bounds-only gluing, or one of the two atom/join gluings of two 8-element
/// contexts (the join gluing breaks exclusivity).
pub fn random_pba<R: Rng>(rng: &mut R) -> PartialBooleanAlgebra {
    let family = rng.random_range(0..5u32);
    let algebra = match family {
        0 => {
            let k = rng.random_range(1..=3usize);
            let atoms: Vec<String> = (0..k).map(|i| format!("x{i}")).collect();
            Amalgam {
                contexts: vec![atoms],
                identifications: vec![],
                overrides: vec![],
            }
            .assemble()
            .unwrap()
        }
        1 => {
            // two contexts sharing only the bounds
            let k1 = rng.random_range(2..=3usize);
            let k2 = rng.random_range(2..=5usize - k1);
            Amalgam {
                contexts: vec![
                    (0..k1).map(|i| format!("x{i}")).collect(),
                    (0..k2).map(|i| format!("y{i}")).collect(),
                ],
                identifications: vec![],
                overrides: vec![],
            }
            .assemble()
            .unwrap()
        }
        2 => {
            // three 2-atom contexts sharing only the bounds
            Amalgam {
                contexts: vec![
                    vec!["x0".into(), "x1".into()],
                    vec!["y0".into(), "y1".into()],
                    vec!["z0".into(), "z1".into()],
                ],
                identifications: vec![],
                overrides: vec![],
            }
            .assemble()
            .unwrap()
        }
        3 => {
            // shared atom across two 3-atom contexts (exclusive)
            Amalgam {
                contexts: vec![
                    vec!["x0".into(), "x1".into(), "s".into()],
                    vec!["y0".into(), "y1".into(), "s".into()],
                ],
                identifications: vec![((0, 0b100), (1, 0b100))],
                overrides: vec![],
            }
            .assemble()
            .unwrap()
        }
        _ => {
            // an atom of one context equals a two-atom join of the other
            // (breaks exclusivity and transitivity)
            Amalgam {
                contexts: vec![
                    vec!["x0".into(), "x1".into(), "~s".into()],
                    vec!["y0".into(), "y1".into(), "s".into()],
                ],
                identifications: vec![((0, 0b011), (1, 0b100))],
                overrides: vec![],
            }
            .assemble()
            .unwrap()
        }
    };
    shuffled(&algebra, rng)
}

/// Reorder and relabel the elements uniformly at random; the result is
/// isomorphic to the input.
pub fn shuffled<R: Rng>(algebra: &PartialBooleanAlgebra, rng: &mut R) -> PartialBooleanAlgebra {
    let n = algebra.len();
    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let raw = algebra.to_raw();
    let rename = |l: &String| format!("n{}", order[algebra.element(l).unwrap()]);
    let mut elements: Vec<(usize, String)> = raw
        .elements
        .iter()
        .map(|l| (order[algebra.element(l).unwrap()], rename(l)))
        .collect();
    elements.sort();
    let out = RawAlgebra {
        elements: elements.into_iter().map(|(_, l)| l).collect(),
        zero: rename(&raw.zero),
        one: rename(&raw.one),
        compat: raw
            .compat
            .iter()
            .map(|(a, b)| (rename(a), rename(b)))
            .collect(),
        meet: raw
            .meet
            .iter()
            .map(|(a, b, r)| (rename(a), rename(b), rename(r)))
            .collect(),
        join: raw
            .join
            .iter()
            .map(|(a, b, r)| (rename(a), rename(b), rename(r)))
            .collect(),
        neg: raw
            .neg
            .iter()
            .map(|(a, r)| (rename(a), rename(r)))
            .collect(),
    };
    PartialBooleanAlgebra::from_raw(&out).expect("relabeling keeps the tables well formed")
}

/// Erdős–Rényi graph with edge probability `p`.
pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> AtomGraph {
    let mut g = AtomGraph::new((0..n).map(|i| format!("v{i}")).collect());
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<f64>() < p {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// Strictly positive weights, uniform on `[0.05, 2.05)`.
pub fn random_positive_weights<R: Rng>(n: usize, rng: &mut R) -> WeightFunction {
    WeightFunction::new((0..n).map(|_| 0.05 + 2.0 * rng.random::<f64>()).collect())
        .expect("positive weights")
}

/// A random point of the graph-state polytope: a convex combination of the
/// 0-1 states and an interior feasible point, or `None` when the polytope is
/// empty.
pub fn random_graph_state<R: Rng>(graph: &AtomGraph, rng: &mut R) -> Option<GraphState> {
    let base = state_feasible(graph).ok()??;
    let mut corners = zero_one_states(graph).unwrap_or_default();
    corners.truncate(64);
    corners.push(base);
    // Dirichlet weights via normalized exponentials
    let mut coeffs: Vec<f64> = (0..corners.len())
        .map(|_| -(1.0 - rng.random::<f64>()).ln())
        .collect();
    let total: f64 = coeffs.iter().sum();
    for c in &mut coeffs {
        *c /= total;
    }
    let mut values = vec![0.0f64; graph.len()];
    for (c, corner) in coeffs.iter().zip(&corners) {
        for (slot, &cv) in values.iter_mut().zip(&corner.values) {
            *slot += c * cv;
        }
    }
    Some(GraphState { values })
}

/// Random mixed state: `G G† / tr(G G†)` with complex Gaussian entries.
pub fn random_density_matrix<R: Rng>(dim: usize, rng: &mut R) -> DensityMatrix {
    // Box-Muller pairs
    let mut gauss = || {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random::<f64>();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    };
    let mut g = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            g[(i, j)] = Complex64::new(gauss(), gauss());
        }
    }
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m / Complex64::new(tr, 0.0)).expect("normalized Gram matrix")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::DEFAULT_ELEMENT_CAP;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_pbas_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let alg = random_pba(&mut rng);
            assert!(alg.len() <= 12);
            assert!(alg.validate(DEFAULT_ELEMENT_CAP).unwrap().ok());
        }
    }

    #[test]
    fn shuffling_preserves_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let b1 = crate::scenarios::algebra_b1();
        for _ in 0..5 {
            let s = shuffled(&b1, &mut rng);
            assert!(s.validate(DEFAULT_ELEMENT_CAP).unwrap().ok());
            assert_eq!(s.atoms().len(), 5);
            assert!(crate::iso::are_isomorphic(&b1, &s, 1_000_000)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn graph_states_satisfy_clique_sums() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = crate::scenarios::algebra_b1().atom_graph();
        let cover = g.maximal_cliques().unwrap();
        for _ in 0..20 {
            let s = random_graph_state(&g, &mut rng).unwrap();
            for clique in &cover.cliques {
                let sum: f64 = clique.iter().map(|&v| s.values[v]).sum();
                assert!((sum - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn density_matrices_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for dim in [2usize, 3, 4] {
            for _ in 0..5 {
                let rho = random_density_matrix(dim, &mut rng);
                assert_eq!(rho.dim(), dim);
            }
        }
    }
}

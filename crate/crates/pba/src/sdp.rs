//! Dense primal-dual interior-point solver for semidefinite programs whose
//! constraints fix the trace and zero out selected off-diagonal entries:
//!
//! ```text
//!     min ⟨C, X⟩   s.t.   tr(X) = t,   X_ij = 0 for (i,j) ∈ E,   X ⪰ 0.
//! ```
//!
//! Scaled Newton directions with Mehrotra-style adaptive centering. The
//! starting point `X = (t/n)·I`, `y = 0` except a trace multiplier pushing
//! `S = C - y₀I ≻ 0`, is exactly feasible on both sides, and the iteration
//! preserves feasibility, so `⟨X, S⟩` is a certified primal-dual gap at
//! every step.

use nalgebra::{Cholesky, DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpError {
    #[error(
        "no convergence after {iterations} iterations: gap {gap:.3e}, residuals {primal_residual:.3e}/{dual_residual:.3e}"
    )]
    NotConverged {
        iterations: usize,
        gap: f64,
        primal_residual: f64,
        dual_residual: f64,
    },
    #[error("numerical breakdown: {0}")]
    Numerical(String),
}

/// The trace-and-edge-zero program data.
#[derive(Debug, Clone)]
pub struct TraceEdgeSdp {
    /// Symmetric objective matrix (minimized against X).
    pub c: DMatrix<f64>,
    /// Off-diagonal positions forced to zero, as `i < j` pairs.
    pub edges: Vec<(usize, usize)>,
    /// Right-hand side of the trace constraint.
    pub trace: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub x: DMatrix<f64>,
    /// Multipliers: index 0 is the trace constraint, then one per edge.
    pub y: Vec<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Certified duality gap `⟨X, S⟩ ≥ 0`.
    pub gap: f64,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct SdpOptions {
    pub max_iterations: usize,
    /// Absolute gap target.
    pub gap_tolerance: f64,
}

impl Default for SdpOptions {
    fn default() -> Self {
        SdpOptions {
            max_iterations: 200,
            gap_tolerance: 1e-8,
        }
    }
}

pub fn solve(problem: &TraceEdgeSdp, options: SdpOptions) -> Result<SdpSolution, SdpError> {
    let n = problem.c.nrows();
    assert_eq!(problem.c.ncols(), n);
    assert!(problem.trace > 0.0);
    let m = 1 + problem.edges.len();
    let edges = &problem.edges;
    for &(i, j) in edges {
        assert!(
            i < j && j < n,
            "edges must be i < j pairs inside the matrix"
        );
    }

    // b = (trace, 0, ..., 0)
    let mut b = vec![0.0f64; m];
    b[0] = problem.trace;

    // A(X): trace plus 2*X_ij per edge.
    let apply_a = |x: &DMatrix<f64>| -> Vec<f64> {
        let mut out = Vec::with_capacity(m);
        out.push(x.trace());
        for &(i, j) in edges {
            out.push(2.0 * x[(i, j)]);
        }
        out
    };
    // Aᵀ(y) = y₀ I + Σ y_k E_k.
    let apply_at = |y: &[f64]| -> DMatrix<f64> {
        let mut out = DMatrix::<f64>::identity(n, n) * y[0];
        for (k, &(i, j)) in edges.iter().enumerate() {
            out[(i, j)] += y[k + 1];
            out[(j, i)] += y[k + 1];
        }
        out
    };

    // Exactly feasible interior start.
    let mut x = DMatrix::<f64>::identity(n, n) * (problem.trace / n as f64);
    let mut y = vec![0.0f64; m];
    y[0] = -(problem.c.norm() + 1.0);
    let mut s = &problem.c - apply_at(&y);

    let mut iterations = 0usize;
    let mut gap = x.dot(&s);

    while gap > options.gap_tolerance {
        if iterations >= options.max_iterations {
            let (rp, rd) = residuals(problem, &apply_a, &apply_at, &b, &x, &y, &s);
            return Err(SdpError::NotConverged {
                iterations,
                gap,
                primal_residual: rp,
                dual_residual: rd,
            });
        }
        iterations += 1;
        let mu = gap / n as f64;

        // Scaling point W with W S W = X.
        let lx = Cholesky::new(symmetrize(&x))
            .ok_or_else(|| SdpError::Numerical("primal iterate lost definiteness".into()))?
            .l();
        let inner = symmetrize(&(lx.transpose() * &s * &lx));
        let eig = SymmetricEigen::new(inner);
        if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
            return Err(SdpError::Numerical("dual iterate lost definiteness".into()));
        }
        let quarter = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| l.powf(-0.25)));
        let g = &lx * eig.eigenvectors * quarter;
        let w = symmetrize(&(&g * g.transpose()));

        let s_chol = Cholesky::new(symmetrize(&s))
            .ok_or_else(|| SdpError::Numerical("dual iterate lost definiteness".into()))?;
        let s_inv = s_chol.inverse();

        // Schur complement M[k][l] = <A_k, W A_l W>.
        let w2 = symmetrize(&(&w * &w));
        let mut schur = DMatrix::<f64>::zeros(m, m);
        schur[(0, 0)] = w2.trace() + 1e-13;
        for (k, &(i, j)) in edges.iter().enumerate() {
            let v = 2.0 * w2[(i, j)];
            schur[(0, k + 1)] = v;
            schur[(k + 1, 0)] = v;
        }
        for (k, &(i, j)) in edges.iter().enumerate() {
            for (l, &(p, q)) in edges.iter().enumerate().skip(k) {
                let v = 2.0 * (w[(i, p)] * w[(j, q)] + w[(i, q)] * w[(j, p)]);
                schur[(k + 1, l + 1)] = v;
                schur[(l + 1, k + 1)] = v;
            }
            schur[(k + 1, k + 1)] += 1e-13;
        }
        let schur_chol = Cholesky::new(schur)
            .ok_or_else(|| SdpError::Numerical("Schur complement not positive definite".into()))?;

        let a_sinv = apply_a(&s_inv);
        let direction = |sigma_mu: f64| {
            let rhs =
                nalgebra::DVector::from_iterator(m, (0..m).map(|k| b[k] - sigma_mu * a_sinv[k]));
            let dy = schur_chol.solve(&rhs);
            let ds = -apply_at(dy.as_slice());
            let dx_raw = &s_inv * sigma_mu - &x - &w * &ds * &w;
            (dy, ds, symmetrize(&dx_raw))
        };

        // Predictor fixes the centering weight, corrector takes the step.
        let (_, ds_aff, dx_aff) = direction(0.0);
        let ap = max_step(&x, &dx_aff);
        let ad = max_step(&s, &ds_aff);
        let gap_aff = (&x + &dx_aff * ap.min(1.0)).dot(&(&s + &ds_aff * ad.min(1.0)));
        let sigma = (gap_aff / gap).clamp(0.0, 1.0).powi(3).max(1e-10);

        let (dy, ds, dx) = direction(sigma * mu);
        let tau = 0.98;
        let ap = (tau * max_step(&x, &dx)).min(1.0);
        let ad = (tau * max_step(&s, &ds)).min(1.0);
        x += &dx * ap;
        for (yk, dyk) in y.iter_mut().zip(dy.iter()) {
            *yk += ad * dyk;
        }
        s += &ds * ad;
        x = symmetrize(&x);
        s = symmetrize(&s);
        gap = x.dot(&s);
        if !gap.is_finite() {
            return Err(SdpError::Numerical("gap is not finite".into()));
        }
    }

    let (primal_residual, dual_residual) = residuals(problem, &apply_a, &apply_at, &b, &x, &y, &s);
    let primal_objective = problem.c.dot(&x);
    let dual_objective = b.iter().zip(&y).map(|(bi, yi)| bi * yi).sum();
    Ok(SdpSolution {
        x,
        y,
        primal_objective,
        dual_objective,
        gap,
        iterations,
        primal_residual,
        dual_residual,
    })
}

fn residuals(
    problem: &TraceEdgeSdp,
    apply_a: &impl Fn(&DMatrix<f64>) -> Vec<f64>,
    apply_at: &impl Fn(&[f64]) -> DMatrix<f64>,
    b: &[f64],
    x: &DMatrix<f64>,
    y: &[f64],
    s: &DMatrix<f64>,
) -> (f64, f64) {
    let ax = apply_a(x);
    let rp = ax
        .iter()
        .zip(b)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    let rd = (&problem.c - s - apply_at(y)).norm();
    (rp, rd)
}

fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Largest step `a` keeping `P + a D` positive definite (capped well above 1).
fn max_step(p: &DMatrix<f64>, d: &DMatrix<f64>) -> f64 {
    let chol = match Cholesky::new(symmetrize(p)) {
        Some(c) => c,
        None => return 0.0,
    };
    let l = chol.l();
    // solve L Z = D, then L Y = Zᵀ: Y = L⁻¹ D L⁻ᵀ
    let z = l.solve_lower_triangular(d).unwrap_or_else(|| d.clone());
    let yt = l
        .solve_lower_triangular(&z.transpose())
        .unwrap_or_else(|| z.transpose());
    let eig = SymmetricEigen::new(symmetrize(&yt));
    let lambda_min = eig
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    if lambda_min >= -1e-14 {
        1.0e6
    } else {
        -1.0 / lambda_min
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn theta_program(n: usize, edges: Vec<(usize, usize)>) -> TraceEdgeSdp {
        // maximize sum of X entries = minimize <-J, X>
        TraceEdgeSdp {
            c: DMatrix::from_element(n, n, -1.0),
            edges,
            trace: 1.0,
        }
    }

    #[test]
    fn edgeless_value_is_n() {
        let sol = solve(&theta_program(5, vec![]), SdpOptions::default()).unwrap();
        assert!((sol.primal_objective + 5.0).abs() < 1e-6);
        assert!(sol.gap < 1e-7);
    }

    #[test]
    fn complete_graph_value_is_one() {
        let mut edges = Vec::new();
        for i in 0..6 {
            for j in i + 1..6 {
                edges.push((i, j));
            }
        }
        let sol = solve(&theta_program(6, edges), SdpOptions::default()).unwrap();
        assert!((sol.primal_objective + 1.0).abs() < 1e-6);
    }

    #[test]
    fn pentagon_value_is_sqrt5() {
        let edges = vec![(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)];
        let sol = solve(&theta_program(5, edges), SdpOptions::default()).unwrap();
        assert!((-sol.primal_objective - 5f64.sqrt()).abs() < 1e-5);
        assert!(sol.primal_residual < 1e-8);
        assert!(sol.dual_residual < 1e-8);
        // dual bound sandwiches the value
        assert!(-sol.dual_objective + 1e-9 >= -sol.primal_objective);
    }
}

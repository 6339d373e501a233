//! Dense two-phase simplex over `f64`.
//!
//! Sized for desk-scale programs: clique-constrained packing and feasibility
//! polytopes with at most a few hundred rows. Bland's rule throughout, so the
//! method cannot cycle; vertices of these programs are exact up to rounding.

use thiserror::Error;

const EPS: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("simplex failed to terminate within {0} pivots")]
    PivotLimit(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; meaningful only when `status == Optimal`.
    pub objective: f64,
    /// Structural variable values; meaningful only when `status == Optimal`.
    pub x: Vec<f64>,
}

/// Maximize `c · x` subject to the rows and `x ≥ 0`.
pub fn maximize(c: &[f64], rows: &[(Vec<f64>, Relation, f64)]) -> Result<LpSolution, LpError> {
    let n = c.len();
    let m = rows.len();

    // Normalize right-hand sides to be nonnegative.
    let mut norm: Vec<(Vec<f64>, Relation, f64)> = Vec::with_capacity(m);
    for (coeffs, rel, rhs) in rows {
        assert_eq!(coeffs.len(), n, "row width must match objective");
        if *rhs < 0.0 {
            let flipped = match rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
            norm.push((coeffs.iter().map(|v| -v).collect(), flipped, -rhs));
        } else {
            norm.push((coeffs.clone(), *rel, *rhs));
        }
    }

    // Column layout: structural | slack/surplus | artificial | rhs.
    let n_slack = norm
        .iter()
        .filter(|(_, r, _)| matches!(r, Relation::Le | Relation::Ge))
        .count();
    let n_art = norm
        .iter()
        .filter(|(_, r, _)| matches!(r, Relation::Eq | Relation::Ge))
        .count();
    let cols = n + n_slack + n_art;
    let mut tab = vec![vec![0.0f64; cols + 1]; m];
    let mut basis = vec![usize::MAX; m];
    let mut art_cols = Vec::with_capacity(n_art);
    let (mut next_slack, mut next_art) = (n, n + n_slack);
    for (i, (coeffs, rel, rhs)) in norm.iter().enumerate() {
        tab[i][..n].copy_from_slice(coeffs);
        tab[i][cols] = *rhs;
        match rel {
            Relation::Le => {
                tab[i][next_slack] = 1.0;
                basis[i] = next_slack;
                next_slack += 1;
            }
            Relation::Ge => {
                tab[i][next_slack] = -1.0;
                next_slack += 1;
                tab[i][next_art] = 1.0;
                basis[i] = next_art;
                art_cols.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                tab[i][next_art] = 1.0;
                basis[i] = next_art;
                art_cols.push(next_art);
                next_art += 1;
            }
        }
    }

    // Objective rows store z_j - c_j; entering columns have negative entries
    // and the rhs slot carries the current objective value.

    // Phase 1: maximize -(sum of artificials).
    if !art_cols.is_empty() {
        let mut obj = vec![0.0f64; cols + 1];
        for &a in &art_cols {
            obj[a] = 1.0;
        }
        // zero the basic (artificial) columns
        for (i, &b) in basis.iter().enumerate() {
            if art_cols.contains(&b) {
                for j in 0..=cols {
                    obj[j] -= tab[i][j];
                }
                obj[b] = 0.0;
            }
        }
        run_simplex(&mut tab, &mut basis, &mut obj, cols, None)?;
        if obj[cols] < -EPS {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                objective: 0.0,
                x: vec![0.0; n],
            });
        }
        // Pivot remaining artificials out of the basis where possible; rows
        // that stay are all-zero over structural and slack columns and inert.
        for i in 0..m {
            if art_cols.contains(&basis[i]) {
                if let Some(j) = (0..n + n_slack).find(|&j| tab[i][j].abs() > EPS) {
                    pivot(&mut tab, &mut basis, &mut obj, i, j);
                }
            }
        }
    }

    // Phase 2: the real objective, with artificial columns frozen.
    let mut obj = vec![0.0f64; cols + 1];
    for j in 0..n {
        obj[j] = -c[j];
    }
    for (i, &b) in basis.iter().enumerate() {
        if obj[b].abs() > 0.0 {
            let coeff = obj[b];
            for j in 0..=cols {
                obj[j] -= coeff * tab[i][j];
            }
            obj[b] = 0.0;
        }
    }
    let blocked: Vec<usize> = art_cols;
    let status = run_simplex(&mut tab, &mut basis, &mut obj, cols, Some(&blocked))?;

    let mut x = vec![0.0f64; n];
    for (i, &b) in basis.iter().enumerate() {
        if b < n {
            x[b] = tab[i][cols];
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(LpSolution {
        status,
        objective,
        x,
    })
}

/// Primal simplex with Bland's rule on a tableau whose objective row stores
/// negated reduced costs. Returns `Unbounded` when a column has no blocking
/// row.
fn run_simplex(
    tab: &mut [Vec<f64>],
    basis: &mut [usize],
    obj: &mut [f64],
    cols: usize,
    blocked: Option<&[usize]>,
) -> Result<LpStatus, LpError> {
    let m = tab.len();
    let limit = 50_000 + 200 * (m + cols);
    for _ in 0..limit {
        // entering: smallest index with negative (stored) cost
        let entering =
            (0..cols).find(|&j| obj[j] < -EPS && blocked.is_none_or(|bl| !bl.contains(&j)));
        let Some(e) = entering else {
            return Ok(LpStatus::Optimal);
        };
        // leaving: Bland on the minimum ratio
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if tab[i][e] > EPS {
                let ratio = tab[i][cols] / tab[i][e];
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - EPS || (ratio < lr + EPS && basis[i] < basis[li]) {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((l, _)) = leave else {
            return Ok(LpStatus::Unbounded);
        };
        pivot(tab, basis, obj, l, e);
    }
    Err(LpError::PivotLimit(limit))
}

fn pivot(tab: &mut [Vec<f64>], basis: &mut [usize], obj: &mut [f64], row: usize, col: usize) {
    let div = tab[row][col];
    for v in tab[row].iter_mut() {
        *v /= div;
    }
    let pivot_row = std::mem::take(&mut tab[row]);
    for (i, other) in tab.iter_mut().enumerate() {
        if i != row && other[col].abs() > 0.0 {
            let factor = other[col];
            for (t, &pv) in other.iter_mut().zip(&pivot_row) {
                *t -= factor * pv;
            }
            other[col] = 0.0;
        }
    }
    if obj[col].abs() > 0.0 {
        let factor = obj[col];
        for (t, &pv) in obj.iter_mut().zip(&pivot_row) {
            *t -= factor * pv;
        }
        obj[col] = 0.0;
    }
    tab[row] = pivot_row;
    basis[row] = col;
}

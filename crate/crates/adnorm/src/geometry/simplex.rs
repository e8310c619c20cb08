//! A small dense phase-1 simplex (floating point, Bland's rule) used for
//! hull-membership and face-feasibility checks. Not a general LP solver.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimplexError {
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("inconsistent system dimensions")]
    BadDimensions,
}

const MAX_ITERS: usize = 20_000;

/// Searches for `x >= 0` with `A x = b`. Returns a feasible point or `None`.
///
/// `a` is row-major, `m x n`. Phase-1 simplex with artificial variables and
/// Bland's anti-cycling rule; `tol` bounds the residual accepted as zero.
pub fn feasible_nonneg(
    a: &[Vec<f64>],
    b: &[f64],
    tol: f64,
) -> Result<Option<Vec<f64>>, SimplexError> {
    let m = a.len();
    if m == 0 {
        return Ok(Some(Vec::new()));
    }
    let n = a[0].len();
    if a.iter().any(|row| row.len() != n) || b.len() != m {
        return Err(SimplexError::BadDimensions);
    }

    // Tableau: columns [x (n) | artificials (m) | rhs], rows [constraints (m) | objective].
    let cols = n + m + 1;
    let mut t = vec![vec![0.0f64; cols]; m + 1];
    for i in 0..m {
        let flip = if b[i] < 0.0 { -1.0 } else { 1.0 };
        for j in 0..n {
            t[i][j] = flip * a[i][j];
        }
        t[i][n + i] = 1.0;
        t[i][cols - 1] = flip * b[i];
    }
    // Phase-1 objective: minimize sum of artificials. With artificials basic,
    // the reduced-cost row is minus the sum of the constraint rows on x-columns.
    for j in 0..n {
        let s: f64 = (0..m).map(|i| t[i][j]).sum();
        t[m][j] = -s;
    }
    t[m][cols - 1] = -(0..m).map(|i| t[i][cols - 1]).sum::<f64>();

    let mut basis: Vec<usize> = (n..n + m).collect();
    let pivot_tol = 1e-11;

    for _ in 0..MAX_ITERS {
        // Bland: entering = lowest-index column with negative reduced cost.
        let mut enter = None;
        for (j, &rc) in t[m][..n + m].iter().enumerate() {
            if rc < -pivot_tol {
                enter = Some(j);
                break;
            }
        }
        let Some(col) = enter else { break };

        // Leaving: min ratio, ties by lowest basis variable index.
        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for i in 0..m {
            if t[i][col] > pivot_tol {
                let ratio = t[i][cols - 1] / t[i][col];
                let better = match leave {
                    None => true,
                    Some(prev) => {
                        ratio < best_ratio - 1e-15
                            || ((ratio - best_ratio).abs() <= 1e-15 && basis[i] < basis[prev])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(i);
                }
            }
        }
        let Some(row) = leave else {
            // Unbounded phase-1 cannot happen with artificials; treat as stall.
            return Err(SimplexError::IterationLimit);
        };

        pivot(&mut t, row, col);
        basis[row] = col;
    }

    // Objective value is -t[m][rhs]; feasible iff it is ~0.
    let obj = -t[m][cols - 1];
    if obj > tol {
        return Ok(None);
    }

    let mut x = vec![0.0f64; n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][cols - 1].max(0.0);
        }
    }

    // Residual check guards against a numerically sloppy phase-1 exit.
    for i in 0..m {
        let lhs: f64 = (0..n).map(|j| a[i][j] * x[j]).sum();
        if (lhs - b[i]).abs() > tol.max(1e-8) * (1.0 + b[i].abs()) {
            return Ok(None);
        }
    }
    Ok(Some(x))
}

fn pivot(t: &mut [Vec<f64>], row: usize, col: usize) {
    let cols = t[0].len();
    let p = t[row][col];
    for v in t[row].iter_mut() {
        *v /= p;
    }
    for i in 0..t.len() {
        if i != row {
            let f = t[i][col];
            if f != 0.0 {
                for j in 0..cols {
                    t[i][j] -= f * t[row][j];
                }
            }
        }
    }
}

/// Is `point` in the convex hull of `generators`?
pub fn in_convex_hull(point: &[f64], generators: &[Vec<f64>], tol: f64) -> bool {
    if generators.is_empty() {
        return false;
    }
    let d = point.len();
    let k = generators.len();
    // Rows: d coordinate equations plus the convexity row sum(lambda) = 1.
    let mut a = vec![vec![0.0; k]; d + 1];
    let mut b = vec![0.0; d + 1];
    for (j, g) in generators.iter().enumerate() {
        for i in 0..d {
            a[i][j] = g[i];
        }
        a[d][j] = 1.0;
    }
    b[..d].copy_from_slice(point);
    b[d] = 1.0;
    matches!(feasible_nonneg(&a, &b, tol), Ok(Some(_)))
}

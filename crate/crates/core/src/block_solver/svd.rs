//! Singular values of small dense matrices.
//!
//! One-sided (Hestenes) cyclic Jacobi: plane rotations of column pairs
//! diagonalize `BᵀB` without forming it, and the singular values are the
//! final column norms.

/// Singular values of the row-major `rows x cols` matrix, descending.
/// Returns `min(rows, cols)` values.
pub fn singular_values(b: &[Vec<f64>]) -> Vec<f64> {
    let rows = b.len();
    let cols = b.first().map_or(0, Vec::len);
    if rows == 0 || cols == 0 {
        return Vec::new();
    }
    debug_assert!(b.iter().all(|r| r.len() == cols));

    // work on columns of B (or of Bᵀ when B is wide)
    let mut columns: Vec<Vec<f64>> = if rows >= cols {
        (0..cols).map(|j| b.iter().map(|r| r[j]).collect()).collect()
    } else {
        b.to_vec()
    };

    let n = columns.len();
    for _sweep in 0..100 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta, gamma) = {
                    let (cp, cq) = (&columns[p], &columns[q]);
                    let alpha: f64 = cp.iter().map(|v| v * v).sum();
                    let beta: f64 = cq.iter().map(|v| v * v).sum();
                    let gamma: f64 = cp.iter().zip(cq).map(|(a, b)| a * b).sum();
                    (alpha, beta, gamma)
                };
                if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let (left, right) = columns.split_at_mut(q);
                for (x, y) in left[p].iter_mut().zip(right[0].iter_mut()) {
                    let (xp, xq) = (*x, *y);
                    *x = c * xp - s * xq;
                    *y = s * xp + c * xq;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sigma: Vec<f64> = columns
        .iter()
        .map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    sigma
}

/// Largest singular value.
pub fn spectral_norm(b: &[Vec<f64>]) -> f64 {
    singular_values(b).first().copied().unwrap_or(0.0)
}

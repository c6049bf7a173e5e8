//! Power iteration on `K*K` for an estimate of `‖K‖`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ccbm::ForwardOperator;
use crate::error::{Error, Result};
use crate::fields::BoundaryPair;

/// Running maximum of `‖K x_j‖` over the power iterates `x_j` (unit norm in
/// the boundary inner product). At least 10 iterations are performed.
///
/// The estimate never exceeds `‖K‖` and is nondecreasing in `iters`.
pub fn estimate_op_norm<O: ForwardOperator + ?Sized>(op: &O, iters: usize, seed: u64) -> Result<f64> {
    let n = op.pair_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = BoundaryPair {
        phi: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        t: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
    };
    let mut estimate: f64 = 0.0;
    for step in 0..iters.max(10) {
        let norm = op.pair_norm(&x);
        if norm == 0.0 {
            break;
        }
        x.scale(1.0 / norm);
        let y = op.apply(&x)?;
        let ky = op.field_norm(&y);
        if !ky.is_finite() {
            return Err(Error::NonFinite { step, what: "power iterate" });
        }
        estimate = estimate.max(ky);
        x = op.adjoint(&y)?;
    }
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::regularize::test_ops::Diagonal;

    #[test]
    fn converges_to_largest_entry() {
        let op = Diagonal::new(vec![0.3, 1.7, 0.9, 0.1], 4);
        let est = estimate_op_norm(&op, 200, 3).unwrap();
        assert!((est - 1.7).abs() < 1e-10);
    }

    #[test]
    fn homogeneous_and_monotone() {
        let d = vec![1.0, 0.95, 0.5, 0.2, 0.1, 0.05];
        let op = Diagonal::new(d.clone(), 6);
        let op2 = Diagonal::new(d.iter().map(|v| 2.0 * v).collect(), 6);
        let a = estimate_op_norm(&op, 20, 9).unwrap();
        let b = estimate_op_norm(&op2, 20, 9).unwrap();
        assert!((b - 2.0 * a).abs() <= 1e-6 * b);
        let longer = estimate_op_norm(&op, 40, 9).unwrap();
        assert!(longer >= a);
        assert!(longer <= 1.0 + 1e-12);
        assert_eq!(a, estimate_op_norm(&op, 20, 9).unwrap());
    }
}

//! Direct solver for the coupled block system `S = [A -C; C A]`.
//!
//! `S` acting on `(u1, u2)` is the real form of the complex symmetric matrix
//! `Z = A + iC` acting on `u1 + i u2`. The factorization works on `Z` after a
//! reverse Cuthill-McKee reordering, as a banded LU with partial pivoting.
//! It is computed once per `(mesh, ζ)` and shared by every application of
//! the forward operator, its adjoint and the data map.

mod band;
mod svd;

pub use svd::{singular_values, spectral_norm};

use num_complex::Complex64;

use crate::error::{check_len, Result};
use crate::fem::FemSystem;
use band::BandLu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct FillStats {
    /// Nonzeros of the real `2n x 2n` block matrix.
    pub nnz_matrix: usize,
    /// Stored real entries of the factors (complex entries count as a 2x2 block).
    pub nnz_factor: usize,
    /// Half-bandwidth after reordering.
    pub bandwidth: usize,
}

#[derive(Debug, Clone)]
pub struct BlockFactor {
    n: usize,
    /// `order[k]` is the original index of the unknown in position `k`.
    order: Vec<usize>,
    lu: BandLu,
    pub stats: FillStats,
}

impl BlockFactor {
    pub fn factorize(fem: &FemSystem) -> Result<BlockFactor> {
        let n = fem.n();
        // unit values: the ordering only needs the (symmetric) pattern, and
        // assembled entries are symmetric only up to rounding
        let pattern = fem.stiffness.map(|_| 1.0);
        let order: Vec<usize> = sprs::linalg::reverse_cuthill_mckee(pattern.view())
            .perm
            .vec();
        let mut position = vec![0; n];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }

        let mut entries = Vec::with_capacity(pattern.nnz());
        let mut bandwidth = 0;
        for (&v, (i, j)) in fem.stiffness.iter() {
            let (pi, pj) = (position[i], position[j]);
            bandwidth = bandwidth.max(pi.abs_diff(pj));
            entries.push((pi, pj, Complex64::new(v, 0.0)));
        }
        for (&v, (i, j)) in fem.boundary_mass.iter() {
            let (pi, pj) = (position[i], position[j]);
            bandwidth = bandwidth.max(pi.abs_diff(pj));
            entries.push((pi, pj, Complex64::new(0.0, v)));
        }

        let lu = BandLu::factor(n, bandwidth, &entries)?;
        let stats = FillStats {
            nnz_matrix: 2 * fem.stiffness.nnz() + 2 * fem.boundary_mass.nnz(),
            nnz_factor: 4 * lu.stored_entries(),
            bandwidth,
        };
        Ok(BlockFactor {
            n,
            order,
            lu,
            stats,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Solves `[A -C; C A] [u1; u2] = [rhs_r; rhs_i]`.
    pub fn solve_block(&self, rhs_r: &[f64], rhs_i: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        check_len("block solve (real part)", self.n, rhs_r.len())?;
        check_len("block solve (imaginary part)", self.n, rhs_i.len())?;
        let mut work: Vec<Complex64> = self
            .order
            .iter()
            .map(|&i| Complex64::new(rhs_r[i], rhs_i[i]))
            .collect();
        self.lu.solve_in_place(&mut work);
        let mut u1 = vec![0.0; self.n];
        let mut u2 = vec![0.0; self.n];
        for (k, &i) in self.order.iter().enumerate() {
            u1[i] = work[k].re;
            u2[i] = work[k].im;
        }
        Ok((u1, u2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::assemble;
    use crate::mesh::generate_annulus;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn norm(x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    #[test]
    fn recovers_random_solution() {
        let mesh = generate_annulus(1.0, 2.0, 16, 2).unwrap();
        let fem = assemble(&mesh, 1.0).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let x1 = random_vec(&mut rng, fem.n());
            let x2 = random_vec(&mut rng, fem.n());
            let (b1, b2) = fem.block_apply(&x1, &x2);
            let (y1, y2) = factor.solve_block(&b1, &b2).unwrap();
            let err: Vec<f64> = y1.iter().zip(&x1).chain(y2.iter().zip(&x2)).map(|(a, b)| a - b).collect();
            let scale = norm(&[x1.clone(), x2.clone()].concat());
            assert!(norm(&err) <= 1e-10 * scale);

            let (r1, r2) = fem.block_apply(&y1, &y2);
            let res: Vec<f64> = r1.iter().zip(&b1).chain(r2.iter().zip(&b2)).map(|(a, b)| a - b).collect();
            assert!(norm(&res) <= 1e-10 * norm(&[b1.clone(), b2.clone()].concat()));
        }
    }

    #[test]
    fn anisotropic_system() {
        let mesh = generate_annulus(1.0, 2.0, 20, 3).unwrap();
        let fem = assemble(&mesh, 0.1).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        let x1: Vec<f64> = (0..fem.n()).map(|i| (i as f64 * 0.3).cos()).collect();
        let x2: Vec<f64> = (0..fem.n()).map(|i| (i as f64 * 0.7).sin()).collect();
        let (b1, b2) = fem.block_apply(&x1, &x2);
        let (y1, y2) = factor.solve_block(&b1, &b2).unwrap();
        let err: Vec<f64> = y1.iter().zip(&x1).chain(y2.iter().zip(&x2)).map(|(a, b)| a - b).collect();
        assert!(norm(&err) <= 1e-10 * norm(&[x1, x2].concat()));
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let mesh = generate_annulus(1.0, 2.0, 8, 2).unwrap();
        let fem = assemble(&mesh, 2.0).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        let zero = vec![0.0; fem.n()];
        let (u1, u2) = factor.solve_block(&zero, &zero).unwrap();
        assert!(u1.iter().chain(&u2).all(|&v| v == 0.0));
    }

    #[test]
    fn repeated_solves_are_identical() {
        let mesh = generate_annulus(1.0, 2.0, 12, 3).unwrap();
        let fem = assemble(&mesh, 1.0).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        let b: Vec<f64> = (0..fem.n()).map(|i| (i as f64).sin()).collect();
        let first = factor.solve_block(&b, &b).unwrap();
        let second = factor.solve_block(&b, &b).unwrap();
        assert_eq!(first, second);
    }

    #[test]
    fn dimension_mismatch() {
        let mesh = generate_annulus(1.0, 2.0, 8, 1).unwrap();
        let fem = assemble(&mesh, 1.0).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        assert!(factor.solve_block(&[0.0; 3], &[0.0; 16]).is_err());
    }

    #[test]
    fn reordering_narrows_the_band() {
        let mesh = generate_annulus(1.0, 2.0, 64, 8).unwrap();
        let fem = assemble(&mesh, 1.0).unwrap();
        let factor = BlockFactor::factorize(&fem).unwrap();
        // natural ring ordering has half-bandwidth n_theta + 1
        assert!(factor.stats.bandwidth < 64, "{:?}", factor.stats);
        assert!(factor.stats.nnz_factor >= factor.stats.nnz_matrix);
    }
}

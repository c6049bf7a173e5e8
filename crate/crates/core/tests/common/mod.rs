#![allow(dead_code)]

use ccbm::ccbm::{CcbmOperator, ForwardOperator};
use ccbm::fem::{restrict, SparseMatrix};
use ccbm::fields::{BoundaryPair, DomainField};
use ccbm::regularize::{Gkb, GkbOptions};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn to_dense(mat: &SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(mat.rows(), mat.cols());
    for (v, (i, j)) in mat.iter() {
        d[(i, j)] += *v;
    }
    d
}

/// Dense matrices of `K`, `K*` and both Gram matrices, built column by
/// column through the operator interface.
pub struct DenseOperator {
    pub k: DMatrix<f64>,
    pub kstar: DMatrix<f64>,
    /// Field Gram matrix `M`.
    pub m: DMatrix<f64>,
    /// Pair Gram matrix `diag(C_u, C_u)` on the `Γ_u` nodes.
    pub g: DMatrix<f64>,
}

pub fn dense_operator(op: &CcbmOperator) -> DenseOperator {
    let (n, nu) = (op.field_dim(), op.pair_dim());
    let mut k = DMatrix::zeros(n, 2 * nu);
    for c in 0..2 * nu {
        let mut e = vec![0.0; 2 * nu];
        e[c] = 1.0;
        let col = op.apply(&BoundaryPair::from_stacked(&e)).unwrap();
        k.set_column(c, &DVector::from_vec(col.0));
    }
    let mut kstar = DMatrix::zeros(2 * nu, n);
    for c in 0..n {
        let mut e = vec![0.0; n];
        e[c] = 1.0;
        let col = op.adjoint(&DomainField(e)).unwrap();
        kstar.set_column(c, &DVector::from_vec(col.to_stacked()));
    }
    let fem = op.fem();
    let cu = to_dense(&restrict(&fem.boundary_mass_u, &fem.gamma_u_nodes));
    let mut g = DMatrix::zeros(2 * nu, 2 * nu);
    g.view_mut((0, 0), (nu, nu)).copy_from(&cu);
    g.view_mut((nu, nu), (nu, nu)).copy_from(&cu);
    DenseOperator { k, kstar, m: to_dense(&fem.mass), g }
}

impl DenseOperator {
    /// `R_M K R_G⁻¹` with `M = R_MᵀR_M`, `G = R_GᵀR_G`: its Euclidean
    /// singular values are those of `K` between the weighted spaces.
    pub fn whitened(&self) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
        let rm = self.m.clone().cholesky().expect("M is SPD").l().transpose();
        let rg = self.g.clone().cholesky().expect("G is SPD").l().transpose();
        let rg_inv = rg.clone().try_inverse().unwrap();
        (&rm * &self.k * rg_inv, rm, rg)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let (b, _, _) = self.whitened();
        let mut s: Vec<f64> = b.singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Minimizer of `‖Kφ - f‖_M` with minimal `‖φ‖_G`, via the SVD
    /// pseudo-inverse of the whitened matrix.
    pub fn least_squares(&self, f: &[f64]) -> Vec<f64> {
        let (b, rm, rg) = self.whitened();
        let rhs = rm * DVector::from_column_slice(f);
        let svd = b.svd(true, true);
        let tol = 1e-13 * svd.singular_values.max();
        let y = svd.solve(&rhs, tol).unwrap();
        let phi = rg.lu().solve(&y).unwrap();
        phi.iter().copied().collect()
    }
}

pub fn random_pair(rng: &mut ChaCha8Rng, n: usize) -> BoundaryPair {
    BoundaryPair {
        phi: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
        t: (0..n).map(|_| rng.random_range(-1.0..1.0)).collect(),
    }
}

pub fn random_field(rng: &mut ChaCha8Rng, n: usize) -> DomainField {
    DomainField((0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Largest `|⟨Kφ, g⟩ - ⟨φ, K*g⟩| / (‖Kφ‖‖g‖)` over random pairs.
pub fn adjoint_identity_error<O: ForwardOperator>(op: &O, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let phi = random_pair(&mut rng, op.pair_dim());
        let g = random_field(&mut rng, op.field_dim());
        let kphi = op.apply(&phi).unwrap();
        let kg = op.adjoint(&g).unwrap();
        let lhs = op.field_inner(&kphi, &g);
        let rhs = op.pair_inner(&phi, &kg);
        let scale = op.field_norm(&kphi) * op.field_norm(&g);
        worst = worst.max((lhs - rhs).abs() / scale);
    }
    worst
}

pub fn strictly_decreasing(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] < w[0])
}

/// Number of eigenvalues of the symmetric `s` below `x` (LDLᵀ inertia).
fn count_below(s: &[Vec<f64>], x: f64) -> usize {
    let n = s.len();
    let mut a: Vec<Vec<f64>> = s.to_vec();
    for (i, row) in a.iter_mut().enumerate() {
        row[i] -= x;
    }
    let mut negatives = 0;
    for k in 0..n {
        let mut d = a[k][k];
        if d == 0.0 {
            d = -1e-300;
        }
        if d < 0.0 {
            negatives += 1;
        }
        for i in k + 1..n {
            let l = a[i][k] / d;
            for j in k + 1..n {
                a[i][j] -= l * a[k][j];
            }
        }
    }
    negatives
}

/// Eigenvalues of a symmetric matrix by bisection on the inertia, descending.
pub fn bisection_eigenvalues(s: &[Vec<f64>]) -> Vec<f64> {
    let n = s.len();
    let radius = s.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut out: Vec<f64> = (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-radius - 1.0, radius + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if count_below(s, mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

/// `κ2(B)` from the eigenvalues of `BᵀB`.
pub fn condition_by_bisection(b: &[Vec<f64>]) -> f64 {
    let cols = b[0].len();
    let gram: Vec<Vec<f64>> = (0..cols)
        .map(|i| (0..cols).map(|j| b.iter().map(|r| r[i] * r[j]).sum()).collect())
        .collect();
    let eig = bisection_eigenvalues(&gram);
    (eig[0] / eig[cols - 1]).sqrt()
}

/// Worst deviations from the properties of the bidiagonalization after
/// `steps` unstopped GKB steps.
#[derive(Debug, Clone, Copy)]
pub struct Invariants {
    pub steps: usize,
    pub orthonormality_v: f64,
    pub orthonormality_p: f64,
    /// `‖Kp_j - β_j v_j - γ_{j+1} v_{j+1}‖ / (β_j + γ_{j+1})`
    pub bidiagonal: f64,
    /// `‖K*v_{j+1} - γ_{j+1} p_j - β_{j+1} p_{j+1}‖ / (γ_{j+1} + β_{j+1})`
    pub bidiagonal_adjoint: f64,
    /// `|‖Σλ_j v_j‖ - ‖λ‖₂| / ‖λ‖₂` over random `λ`.
    pub isometry: f64,
    /// `||μ̄_{k+1}| - ‖Kφ_k - f‖| / ‖Kφ_k - f‖` over all `k`.
    pub residual_identity: f64,
    pub monotone: bool,
}

pub fn gkb_invariants<O: ForwardOperator>(op: &O, f: &DomainField, steps: usize, reorthogonalize: bool) -> Invariants {
    let opts = GkbOptions { reorthogonalize, ..GkbOptions::default() };
    let mut gkb = Gkb::start(op, f, opts).unwrap();
    let mut residual_identity: f64 = 0.0;
    while gkb.state().k < steps && gkb.can_continue() {
        gkb.step().unwrap();
        let st = gkb.state();
        let mut r = op.apply(&st.phi).unwrap();
        r.axpy(-1.0, f);
        let direct = op.field_norm(&r);
        residual_identity = residual_identity.max((gkb.residual() - direct).abs() / direct);
    }
    let st = gkb.state();

    let mut orth_v: f64 = 0.0;
    for (i, vi) in st.v.iter().enumerate() {
        for (j, vj) in st.v.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            orth_v = orth_v.max((op.field_inner(vi, vj) - target).abs());
        }
    }
    let mut orth_p: f64 = 0.0;
    for (i, pi) in st.p.iter().enumerate() {
        for (j, pj) in st.p.iter().enumerate() {
            let target = if i == j { 1.0 } else { 0.0 };
            orth_p = orth_p.max((op.pair_inner(pi, pj) - target).abs());
        }
    }

    let mut bidiagonal: f64 = 0.0;
    let mut bidiagonal_adjoint: f64 = 0.0;
    for j in 0..st.p.len().min(st.v.len() - 1) {
        let mut r = op.apply(&st.p[j]).unwrap();
        r.axpy(-st.betas[j], &st.v[j]);
        r.axpy(-st.gammas[j + 1], &st.v[j + 1]);
        bidiagonal = bidiagonal.max(op.field_norm(&r) / (st.betas[j] + st.gammas[j + 1]));
        if j + 1 < st.p.len() {
            let mut s = op.adjoint(&st.v[j + 1]).unwrap();
            s.axpy(-st.gammas[j + 1], &st.p[j]);
            s.axpy(-st.betas[j + 1], &st.p[j + 1]);
            bidiagonal_adjoint =
                bidiagonal_adjoint.max(op.pair_norm(&s) / (st.gammas[j + 1] + st.betas[j + 1]));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut isometry: f64 = 0.0;
    for _ in 0..10 {
        let lambda: Vec<f64> = (0..st.v.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut sum = DomainField::zeros(op.field_dim());
        for (l, v) in lambda.iter().zip(&st.v) {
            sum.axpy(*l, v);
        }
        let norm = lambda.iter().map(|l| l * l).sum::<f64>().sqrt();
        isometry = isometry.max((op.field_norm(&sum) - norm).abs() / norm);
    }

    Invariants {
        steps: st.k,
        orthonormality_v: orth_v,
        orthonormality_p: orth_p,
        bidiagonal,
        bidiagonal_adjoint,
        isometry,
        residual_identity,
        monotone: strictly_decreasing(&st.residual_history),
    }
}

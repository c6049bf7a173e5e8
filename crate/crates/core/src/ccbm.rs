//! The operator equation `Kφ = f` of the coupled complex boundary method.
//!
//! All three linear systems share the block matrix `S = [A -C; C A]`:
//!
//! * data map: `S [û1; û2] = [C_m Φ; C_m T]`, `f = -û2`
//! * forward:  `S [ũ1; ũ2] = [C_u φ; C_u t]`, `Kφ = ũ2`
//! * adjoint:  `S [w1; w2] = [M g; 0]`, `K*g = (w2|Γu, w1|Γu)`
//!
//! `K*` is the exact adjoint of `K` for the inner products `aᵀMb` on fields
//! and `φᵀC_u ψ + tᵀC_u s` on boundary pairs.

use serde::{Deserialize, Serialize};

use crate::block_solver::BlockFactor;
use crate::error::{check_len, Result};
use crate::fem::{assemble, restrict, spmv, FemSystem, SparseMatrix};
use crate::fields::{BoundaryPair, DomainField};
use crate::mesh::Mesh;

/// Cauchy data on the accessible boundary, indexed like `nodes`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CauchyData {
    /// Global indices of the `Γ_m` nodes (sorted).
    pub nodes: Vec<usize>,
    /// Neumann data `Φ` (or `Φ^δ`).
    pub phi_m: Vec<f64>,
    /// Dirichlet data `T` (or `T^δ`).
    pub t_m: Vec<f64>,
    /// Relative noise level used to perturb the data.
    pub delta_prime: f64,
    /// Absolute noise level `‖f^δ - f‖` once known; zero for exact data.
    pub delta: f64,
}

/// Linear map between boundary pairs on `Γ_u` and fields on `Ω`, together
/// with the inner products of both spaces. The iterative solvers only see
/// this interface.
pub trait ForwardOperator: Sync {
    /// Length of a field.
    fn field_dim(&self) -> usize;
    /// Length of each half of a boundary pair.
    fn pair_dim(&self) -> usize;

    fn apply(&self, phi: &BoundaryPair) -> Result<DomainField>;
    fn adjoint(&self, g: &DomainField) -> Result<BoundaryPair>;

    /// Gram matrix of the field inner product applied to `g`.
    fn weight_field(&self, g: &DomainField) -> DomainField;
    /// Gram matrix of the pair inner product applied to `p`.
    fn weight_pair(&self, p: &BoundaryPair) -> BoundaryPair;

    fn field_inner(&self, a: &DomainField, b: &DomainField) -> f64 {
        self.weight_field(a).dot(b)
    }
    fn pair_inner(&self, a: &BoundaryPair, b: &BoundaryPair) -> f64 {
        self.weight_pair(a).dot(b)
    }
    fn field_norm(&self, g: &DomainField) -> f64 {
        self.field_inner(g, g).max(0.0).sqrt()
    }
    fn pair_norm(&self, p: &BoundaryPair) -> f64 {
        self.pair_inner(p, p).max(0.0).sqrt()
    }
}

fn embed(n: usize, ids: &[usize], values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (&i, &v) in ids.iter().zip(values) {
        out[i] = v;
    }
    out
}

fn extract(full: &[f64], ids: &[usize]) -> Vec<f64> {
    ids.iter().map(|&i| full[i]).collect()
}

/// Solves the data problem and returns `f = -û2`.
pub fn compute_rhs(factor: &BlockFactor, fem: &FemSystem, data: &CauchyData) -> Result<DomainField> {
    let m = fem.gamma_m_nodes.len();
    check_len("Cauchy data nodes", m, data.nodes.len())?;
    check_len("Neumann data", m, data.phi_m.len())?;
    check_len("Dirichlet data", m, data.t_m.len())?;
    let n = fem.n();
    let rhs_r = spmv(&fem.boundary_mass_m, &embed(n, &data.nodes, &data.phi_m));
    let rhs_i = spmv(&fem.boundary_mass_m, &embed(n, &data.nodes, &data.t_m));
    let (_, u2) = factor.solve_block(&rhs_r, &rhs_i)?;
    Ok(DomainField(u2.into_iter().map(|v| -v).collect()))
}

/// `Kφ`: the imaginary part of the solution driven by `φ + i t` on `Γ_u`.
pub fn apply_k(factor: &BlockFactor, fem: &FemSystem, phi: &BoundaryPair) -> Result<DomainField> {
    let nu = fem.gamma_u_nodes.len();
    check_len("boundary pair (phi)", nu, phi.phi.len())?;
    check_len("boundary pair (t)", nu, phi.t.len())?;
    let n = fem.n();
    let rhs_r = spmv(&fem.boundary_mass_u, &embed(n, &fem.gamma_u_nodes, &phi.phi));
    let rhs_i = spmv(&fem.boundary_mass_u, &embed(n, &fem.gamma_u_nodes, &phi.t));
    let (_, u2) = factor.solve_block(&rhs_r, &rhs_i)?;
    Ok(DomainField(u2))
}

/// `K*g = (w2|Γu, w1|Γu)`.
pub fn apply_kstar(factor: &BlockFactor, fem: &FemSystem, g: &DomainField) -> Result<BoundaryPair> {
    check_len("domain field", fem.n(), g.len())?;
    let mg = spmv(&fem.mass, &g.0);
    let (w1, w2) = factor.solve_block(&mg, &vec![0.0; fem.n()])?;
    Ok(BoundaryPair {
        phi: extract(&w2, &fem.gamma_u_nodes),
        t: extract(&w1, &fem.gamma_u_nodes),
    })
}

/// `(gᵀ M g)^{1/2}`
pub fn norm_q(fem: &FemSystem, g: &DomainField) -> Result<f64> {
    check_len("domain field", fem.n(), g.len())?;
    Ok(spmv(&fem.mass, &g.0).iter().zip(&g.0).map(|(a, b)| a * b).sum::<f64>().max(0.0).sqrt())
}

/// `(φᵀ C_u φ + tᵀ C_u t)^{1/2}`
pub fn norm_qu(fem: &FemSystem, phi: &BoundaryPair) -> Result<f64> {
    let nu = fem.gamma_u_nodes.len();
    check_len("boundary pair (phi)", nu, phi.phi.len())?;
    check_len("boundary pair (t)", nu, phi.t.len())?;
    let n = fem.n();
    let quad = |x: &[f64]| {
        let full = embed(n, &fem.gamma_u_nodes, x);
        spmv(&fem.boundary_mass_u, &full).iter().zip(&full).map(|(a, b)| a * b).sum::<f64>()
    };
    Ok((quad(&phi.phi) + quad(&phi.t)).max(0.0).sqrt())
}

/// Assembled and factorized CCBM operator for one mesh and diffusion ratio.
#[derive(Debug, Clone)]
pub struct CcbmOperator {
    fem: FemSystem,
    factor: BlockFactor,
    /// `C_u` restricted to the `Γ_u` nodes.
    boundary_gram: SparseMatrix,
}

impl CcbmOperator {
    pub fn new(fem: FemSystem) -> Result<Self> {
        let factor = BlockFactor::factorize(&fem)?;
        let boundary_gram = restrict(&fem.boundary_mass_u, &fem.gamma_u_nodes);
        Ok(CcbmOperator {
            fem,
            factor,
            boundary_gram,
        })
    }

    pub fn from_mesh(mesh: &Mesh, zeta: f64) -> Result<Self> {
        CcbmOperator::new(assemble(mesh, zeta)?)
    }

    pub fn fem(&self) -> &FemSystem {
        &self.fem
    }

    pub fn factor(&self) -> &BlockFactor {
        &self.factor
    }

    pub fn compute_rhs(&self, data: &CauchyData) -> Result<DomainField> {
        compute_rhs(&self.factor, &self.fem, data)
    }

    pub fn norm_q(&self, g: &DomainField) -> Result<f64> {
        norm_q(&self.fem, g)
    }

    pub fn norm_qu(&self, phi: &BoundaryPair) -> Result<f64> {
        check_len("boundary pair (phi)", self.pair_dim(), phi.phi.len())?;
        check_len("boundary pair (t)", self.pair_dim(), phi.t.len())?;
        Ok(self.pair_norm(phi))
    }
}

impl ForwardOperator for CcbmOperator {
    fn field_dim(&self) -> usize {
        self.fem.n()
    }

    fn pair_dim(&self) -> usize {
        self.fem.gamma_u_nodes.len()
    }

    fn apply(&self, phi: &BoundaryPair) -> Result<DomainField> {
        apply_k(&self.factor, &self.fem, phi)
    }

    fn adjoint(&self, g: &DomainField) -> Result<BoundaryPair> {
        apply_kstar(&self.factor, &self.fem, g)
    }

    fn weight_field(&self, g: &DomainField) -> DomainField {
        DomainField(spmv(&self.fem.mass, &g.0))
    }

    fn weight_pair(&self, p: &BoundaryPair) -> BoundaryPair {
        BoundaryPair {
            phi: spmv(&self.boundary_gram, &p.phi),
            t: spmv(&self.boundary_gram, &p.t),
        }
    }
}

//! Linear (P1) finite element matrices on a triangulated annulus.
//!
//! With nodal basis functions `phi_l`:
//!
//! * `A[l, s] = ∫_Ω (κ ∇phi_s) · ∇phi_l` with `κ = diag(1, ζ)`
//! * `M[l, s] = ∫_Ω phi_s phi_l`
//! * `C`, `C_m`, `C_u`: boundary mass on `Γ`, `Γ_m`, `Γ_u`
//!
//! All element integrals are evaluated in closed form.

use sprs::{CsMat, TriMat};

use crate::error::{Error, Result};
use crate::mesh::{signed_area, Mesh, Point};

pub type SparseMatrix = CsMat<f64>;

#[derive(Debug, Clone)]
pub struct FemSystem {
    pub stiffness: SparseMatrix,
    pub mass: SparseMatrix,
    pub boundary_mass: SparseMatrix,
    pub boundary_mass_m: SparseMatrix,
    pub boundary_mass_u: SparseMatrix,
    /// Second diagonal entry of the diffusion tensor `diag(1, ζ)`.
    pub zeta: f64,
    pub gamma_m_nodes: Vec<usize>,
    pub gamma_u_nodes: Vec<usize>,
}

/// Local stiffness matrix of one triangle for `κ = diag(1, zeta)`.
pub fn local_stiffness(p: [Point; 3], zeta: f64) -> Result<[[f64; 3]; 3]> {
    let area = signed_area(p[0], p[1], p[2]);
    if !(area > 0.0) {
        return Err(Error::DegenerateTriangle { index: 0, area });
    }
    // ∇phi_i = (y_j - y_k, x_k - x_j) / (2 area) for (i, j, k) cyclic
    let mut grad = [[0.0; 2]; 3];
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        grad[i] = [
            (p[j][1] - p[k][1]) / (2.0 * area),
            (p[k][0] - p[j][0]) / (2.0 * area),
        ];
    }
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = area * (grad[i][0] * grad[j][0] + zeta * grad[i][1] * grad[j][1]);
        }
    }
    Ok(out)
}

pub fn local_mass(p: [Point; 3]) -> [[f64; 3]; 3] {
    let area = signed_area(p[0], p[1], p[2]);
    let mut out = [[area / 12.0; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        row[i] = area / 6.0;
    }
    out
}

/// Exact `∫_e phi_i phi_j ds` on a straight edge of the given length.
pub fn local_edge_mass(length: f64) -> [[f64; 2]; 2] {
    [
        [length / 3.0, length / 6.0],
        [length / 6.0, length / 3.0],
    ]
}

fn add_edges(tri: &mut TriMat<f64>, mesh: &Mesh, edges: &[[usize; 2]]) {
    for &[a, b] in edges {
        let (pa, pb) = (mesh.nodes[a], mesh.nodes[b]);
        let local = local_edge_mass((pa[0] - pb[0]).hypot(pa[1] - pb[1]));
        let ids = [a, b];
        for i in 0..2 {
            for j in 0..2 {
                tri.add_triplet(ids[i], ids[j], local[i][j]);
            }
        }
    }
}

/// Assembles the five global matrices. `zeta = 1` gives the Laplacian.
pub fn assemble(mesh: &Mesh, zeta: f64) -> Result<FemSystem> {
    if !(zeta.is_finite() && zeta > 0.0) {
        return Err(Error::Parameter(format!(
            "diffusion ratio zeta must be positive and finite, got {zeta}"
        )));
    }
    let n = mesh.n_nodes();
    let mut a = TriMat::new((n, n));
    let mut m = TriMat::new((n, n));
    for (t, ids) in mesh.triangles.iter().enumerate() {
        let p = mesh.triangle_points(t);
        let ke = local_stiffness(p, zeta).map_err(|err| match err {
            Error::DegenerateTriangle { area, .. } => Error::DegenerateTriangle { index: t, area },
            other => other,
        })?;
        let me = local_mass(p);
        for i in 0..3 {
            for j in 0..3 {
                a.add_triplet(ids[i], ids[j], ke[i][j]);
                m.add_triplet(ids[i], ids[j], me[i][j]);
            }
        }
    }

    let mut cm = TriMat::new((n, n));
    let mut cu = TriMat::new((n, n));
    let mut c = TriMat::new((n, n));
    add_edges(&mut cm, mesh, &mesh.gamma_m_edges);
    add_edges(&mut cu, mesh, &mesh.gamma_u_edges);
    add_edges(&mut c, mesh, &mesh.gamma_m_edges);
    add_edges(&mut c, mesh, &mesh.gamma_u_edges);

    Ok(FemSystem {
        stiffness: a.to_csr(),
        mass: m.to_csr(),
        boundary_mass: c.to_csr(),
        boundary_mass_m: cm.to_csr(),
        boundary_mass_u: cu.to_csr(),
        zeta,
        gamma_m_nodes: mesh.gamma_m_nodes.clone(),
        gamma_u_nodes: mesh.gamma_u_nodes.clone(),
    })
}

/// `y = mat * x` for a CSR matrix.
pub fn spmv(mat: &SparseMatrix, x: &[f64]) -> Vec<f64> {
    debug_assert_eq!(mat.cols(), x.len());
    let mut y = vec![0.0; mat.rows()];
    for (row, vec) in mat.outer_iterator().enumerate() {
        y[row] = vec.iter().map(|(col, &v)| v * x[col]).sum();
    }
    y
}

/// Restriction of a square matrix to the rows and columns in `ids`
/// (in that order).
pub fn restrict(mat: &SparseMatrix, ids: &[usize]) -> SparseMatrix {
    let mut local = vec![usize::MAX; mat.rows()];
    for (k, &i) in ids.iter().enumerate() {
        local[i] = k;
    }
    let mut tri = TriMat::new((ids.len(), ids.len()));
    for (k, &i) in ids.iter().enumerate() {
        if let Some(row) = mat.outer_view(i) {
            for (j, &v) in row.iter() {
                if local[j] != usize::MAX {
                    tri.add_triplet(k, local[j], v);
                }
            }
        }
    }
    tri.to_csr()
}

impl FemSystem {
    pub fn n(&self) -> usize {
        self.mass.rows()
    }

    /// Applies the real block operator `[A -C; C A]`.
    pub fn block_apply(&self, x1: &[f64], x2: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let (ax1, ax2) = (spmv(&self.stiffness, x1), spmv(&self.stiffness, x2));
        let (cx1, cx2) = (spmv(&self.boundary_mass, x1), spmv(&self.boundary_mass, x2));
        let y1 = ax1.iter().zip(&cx2).map(|(a, c)| a - c).collect();
        let y2 = cx1.iter().zip(&ax2).map(|(c, a)| c + a).collect();
        (y1, y2)
    }
}

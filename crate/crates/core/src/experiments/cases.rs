//! Closed-form benchmark solutions on the annulus `1 <= |x| <= 2`.
//!
//! Outer data use the outward normal `(x, y) / 2`; the inner Neumann trace
//! uses the normal `-(x, y)` pointing out of the annulus.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ccbm::CauchyData;
use crate::error::{Error, Result};
use crate::fields::BoundaryPair;
use crate::mesh::{boundary_nodes, BoundaryTag, Mesh, Point};

pub const R1: f64 = 1.0;
pub const R2: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseId {
    /// `u = e^x cos y`
    Example1,
    /// `u = x² - y²`
    Example2,
    /// `u = e^{√ζ x} cos y` for the orthotropic operator `div(diag(1, ζ) ∇u)`
    Example3,
}

impl CaseId {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseId::Example1 => "example1",
            CaseId::Example2 => "example2",
            CaseId::Example3 => "example3",
        }
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" | "example1" => Ok(CaseId::Example1),
            "2" | "example2" => Ok(CaseId::Example2),
            "3" | "example3" => Ok(CaseId::Example3),
            other => Err(Error::Parameter(format!("unknown case `{other}` (expected 1, 2 or 3)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkCase {
    pub id: CaseId,
    pub zeta: f64,
}

impl BenchmarkCase {
    pub fn new(id: CaseId, zeta: f64) -> Result<Self> {
        if !(zeta.is_finite() && zeta > 0.0) {
            return Err(Error::Parameter(format!("zeta must be positive, got {zeta}")));
        }
        if id != CaseId::Example3 && zeta != 1.0 {
            return Err(Error::Parameter(format!("zeta applies to example3 only, got {zeta} for {id}")));
        }
        Ok(BenchmarkCase { id, zeta })
    }

    pub fn example1() -> Self {
        BenchmarkCase { id: CaseId::Example1, zeta: 1.0 }
    }

    pub fn example2() -> Self {
        BenchmarkCase { id: CaseId::Example2, zeta: 1.0 }
    }

    pub fn example3(zeta: f64) -> Result<Self> {
        BenchmarkCase::new(CaseId::Example3, zeta)
    }

    /// Exact solution `u†`.
    pub fn u(&self, [x, y]: Point) -> f64 {
        match self.id {
            CaseId::Example1 => x.exp() * y.cos(),
            CaseId::Example2 => x * x - y * y,
            CaseId::Example3 => (self.zeta.sqrt() * x).exp() * y.cos(),
        }
    }

    /// Neumann data `Φ` on the outer circle.
    pub fn neumann_outer(&self, [x, y]: Point) -> f64 {
        match self.id {
            CaseId::Example1 => x.exp() * (x * y.cos() - y * y.sin()) / 2.0,
            CaseId::Example2 => x * x - y * y,
            CaseId::Example3 => {
                let (z, sz) = (self.zeta, self.zeta.sqrt());
                0.5 * (sz * x).exp() * (sz * x * y.cos() - z * y * y.sin())
            }
        }
    }

    /// Dirichlet data `T` on the outer circle.
    pub fn dirichlet_outer(&self, p: Point) -> f64 {
        self.u(p)
    }

    /// Neumann trace `φ†` on the inner circle.
    pub fn neumann_inner(&self, [x, y]: Point) -> f64 {
        match self.id {
            CaseId::Example1 => -x.exp() * (x * y.cos() - y * y.sin()),
            CaseId::Example2 => 2.0 * y * y - 2.0 * x * x,
            CaseId::Example3 => {
                let (z, sz) = (self.zeta, self.zeta.sqrt());
                (sz * x).exp() * (z * y * y.sin() - sz * x * y.cos())
            }
        }
    }

    /// Dirichlet trace `t†` on the inner circle.
    pub fn dirichlet_inner(&self, p: Point) -> f64 {
        self.u(p)
    }

    /// Diffusion ratio for the assembled operator.
    pub fn fem_zeta(&self) -> f64 {
        self.zeta
    }
}

fn check_radius(mesh: &Mesh, nodes: &[usize], r: f64, name: &str) -> Result<()> {
    for &i in nodes {
        let [x, y] = mesh.nodes[i];
        if (x.hypot(y) - r).abs() > 1e-9 * r {
            return Err(Error::Parameter(format!(
                "benchmark cases need r1 = {R1}, r2 = {R2}; {name} node {i} has radius {}",
                x.hypot(y)
            )));
        }
    }
    Ok(())
}

/// Exact Cauchy data on `Γ_m` and the true traces on `Γ_u`.
pub fn evaluate_case(case: &BenchmarkCase, mesh: &Mesh) -> Result<(CauchyData, BoundaryPair)> {
    let m_nodes = boundary_nodes(mesh, BoundaryTag::GammaM);
    let u_nodes = boundary_nodes(mesh, BoundaryTag::GammaU);
    if m_nodes.is_empty() || u_nodes.is_empty() {
        return Err(Error::Parameter("mesh has an empty boundary part".into()));
    }
    check_radius(mesh, &m_nodes, R2, "gamma_m")?;
    check_radius(mesh, &u_nodes, R1, "gamma_u")?;

    let at = |ids: &[usize], f: &dyn Fn(Point) -> f64| -> Vec<f64> {
        ids.iter().map(|&i| f(mesh.nodes[i])).collect()
    };
    let data = CauchyData {
        phi_m: at(&m_nodes, &|p| case.neumann_outer(p)),
        t_m: at(&m_nodes, &|p| case.dirichlet_outer(p)),
        nodes: m_nodes,
        delta_prime: 0.0,
        delta: 0.0,
    };
    let truth = BoundaryPair {
        phi: at(&u_nodes, &|p| case.neumann_inner(p)),
        t: at(&u_nodes, &|p| case.dirichlet_inner(p)),
    };
    Ok((data, truth))
}

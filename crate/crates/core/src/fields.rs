//! Nodal coefficient vectors for the two Hilbert spaces of the operator
//! equation: fields over all mesh nodes, and pairs of boundary traces on
//! the inner circle.

use serde::{Deserialize, Serialize};

/// Real nodal vector over every mesh node (an element of `L²(Ω)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DomainField(pub Vec<f64>);

/// Complex boundary function `φ + i t` on `Γ_u`, stored as two real nodal
/// vectors indexed by the sorted `Γ_u` node list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPair {
    /// Neumann part.
    pub phi: Vec<f64>,
    /// Dirichlet part.
    pub t: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(y: &mut [f64], a: f64, x: &[f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

impl DomainField {
    pub fn zeros(n: usize) -> Self {
        DomainField(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, other: &DomainField) -> f64 {
        dot(&self.0, &other.0)
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &DomainField) {
        axpy(&mut self.0, a, &x.0);
    }

    pub fn scale(&mut self, a: f64) {
        self.0.iter_mut().for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> DomainField {
        DomainField(self.0.iter().map(|v| a * v).collect())
    }

    pub fn sub(&self, other: &DomainField) -> DomainField {
        DomainField(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl BoundaryPair {
    pub fn zeros(n: usize) -> Self {
        BoundaryPair {
            phi: vec![0.0; n],
            t: vec![0.0; n],
        }
    }

    pub fn len(&self) -> usize {
        self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phi.is_empty()
    }

    /// Euclidean dot product of the stacked coefficient vectors.
    pub fn dot(&self, other: &BoundaryPair) -> f64 {
        dot(&self.phi, &other.phi) + dot(&self.t, &other.t)
    }

    pub fn axpy(&mut self, a: f64, x: &BoundaryPair) {
        axpy(&mut self.phi, a, &x.phi);
        axpy(&mut self.t, a, &x.t);
    }

    pub fn scale(&mut self, a: f64) {
        self.phi.iter_mut().chain(self.t.iter_mut()).for_each(|v| *v *= a);
    }

    pub fn scaled(&self, a: f64) -> BoundaryPair {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    pub fn sub(&self, other: &BoundaryPair) -> BoundaryPair {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    pub fn is_finite(&self) -> bool {
        self.phi.iter().chain(&self.t).all(|v| v.is_finite())
    }

    /// Stacked `[phi; t]` coefficient vector.
    pub fn to_stacked(&self) -> Vec<f64> {
        [self.phi.as_slice(), self.t.as_slice()].concat()
    }

    pub fn from_stacked(v: &[f64]) -> BoundaryPair {
        let (phi, t) = v.split_at(v.len() / 2);
        BoundaryPair {
            phi: phi.to_vec(),
            t: t.to_vec(),
        }
    }
}

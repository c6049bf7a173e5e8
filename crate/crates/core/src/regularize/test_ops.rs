use crate::ccbm::ForwardOperator;
use crate::error::Result;
use crate::fields::{BoundaryPair, DomainField};

/// `K e_i = d_i e_i` from the stacked pair space into a field space of
/// dimension `m >= d.len()`, with Euclidean inner products on both sides.
pub struct Diagonal {
    d: Vec<f64>,
    m: usize,
}

impl Diagonal {
    pub fn new(d: Vec<f64>, m: usize) -> Self {
        assert!(d.len() % 2 == 0 && m >= d.len());
        Diagonal { d, m }
    }
}

impl ForwardOperator for Diagonal {
    fn field_dim(&self) -> usize {
        self.m
    }
    fn pair_dim(&self) -> usize {
        self.d.len() / 2
    }
    fn apply(&self, phi: &BoundaryPair) -> Result<DomainField> {
        let mut out = vec![0.0; self.m];
        for (o, (d, x)) in out.iter_mut().zip(self.d.iter().zip(phi.to_stacked())) {
            *o = d * x;
        }
        Ok(DomainField(out))
    }
    fn adjoint(&self, g: &DomainField) -> Result<BoundaryPair> {
        let x: Vec<f64> = self.d.iter().zip(&g.0).map(|(d, v)| d * v).collect();
        Ok(BoundaryPair::from_stacked(&x))
    }
    fn weight_field(&self, g: &DomainField) -> DomainField {
        g.clone()
    }
    fn weight_pair(&self, p: &BoundaryPair) -> BoundaryPair {
        p.clone()
    }
}

//! Cauchy data completion for Laplace-type equations on an annulus.
//!
//! The inverse problem is recast through the coupled complex boundary
//! method as a linear operator equation `Kφ = f` between the boundary space
//! on the inner circle and `L²(Ω)`, discretized with P1 finite elements and
//! regularized by early-stopped Golub-Kahan bidiagonalization (with
//! Landweber and CGLS as baselines).

pub mod block_solver;
pub mod ccbm;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod fields;
pub mod mesh;
pub mod regularize;

pub use error::{Error, Result};

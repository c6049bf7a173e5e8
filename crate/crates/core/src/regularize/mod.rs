//! Iterative regularization of `Kφ = f^δ` with discrepancy stopping.
//!
//! All methods start from `φ0 = 0` and stop at the first iterate whose
//! residual `‖Kφ_k - f^δ‖` is at most `τδ`.

mod cgls;
mod gkb;
mod landweber;
mod power;
#[cfg(test)]
mod test_ops;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::BoundaryPair;

pub use cgls::cgls_solve;
pub use gkb::{bidiagonal_matrix, gkb_condition_numbers, gkb_solve, Gkb, GkbOptions, GkbState, GkbStep};
pub use landweber::{landweber_solve, StepSize};
pub use power::estimate_op_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Gkb,
    Landweber,
    Cgls,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Landweber, Method::Cgls, Method::Gkb];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Gkb => "gkb",
            Method::Landweber => "landweber",
            Method::Cgls => "cgls",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gkb" => Ok(Method::Gkb),
            "landweber" => Ok(Method::Landweber),
            "cgls" => Ok(Method::Cgls),
            other => Err(Error::Parameter(format!(
                "unknown method `{other}` (expected gkb, landweber or cgls)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Discrepancy,
    /// The Krylov space was exhausted before the discrepancy test passed
    /// (or exactly when it passed with zero residual).
    Breakdown,
    MaxIter,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Discrepancy => "discrepancy",
            StopReason::Breakdown => "breakdown",
            StopReason::MaxIter => "max_iter",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StoppingConfig {
    /// Discrepancy factor, `τ > 1`.
    pub tau: f64,
    pub max_iter: usize,
    /// Breakdown threshold for `γ` and `β`, relative to `γ1 = ‖f^δ‖`.
    pub breakdown_eps: f64,
}

impl Default for StoppingConfig {
    fn default() -> Self {
        StoppingConfig {
            tau: 1.01,
            max_iter: 2000,
            breakdown_eps: 1e-14,
        }
    }
}

impl StoppingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 1.0) {
            return Err(Error::Parameter(format!("tau must exceed 1, got {}", self.tau)));
        }
        if self.max_iter < 1 {
            return Err(Error::Parameter("max_iter must be at least 1".into()));
        }
        if !(self.breakdown_eps.is_finite() && self.breakdown_eps >= 0.0) {
            return Err(Error::Parameter("breakdown_eps must be nonnegative".into()));
        }
        Ok(())
    }
}

/// Bidiagonalization coefficients of a GKB run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GkbDiagnostics {
    pub gammas: Vec<f64>,
    pub betas: Vec<f64>,
    /// `κ2(G_j)` for `j = 1..=k`, when requested.
    pub condition_numbers: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub method: Method,
    pub k_delta: usize,
    pub phi: BoundaryPair,
    /// `‖Kφ_k - f^δ‖` for `k = 0..=k_delta`.
    pub residual_history: Vec<f64>,
    pub gkb: Option<GkbDiagnostics>,
    pub stop_reason: StopReason,
    pub wall_ms: f64,
}

impl RunReport {
    pub fn final_residual(&self) -> f64 {
        *self.residual_history.last().expect("history holds the initial residual")
    }

    /// Whether the returned iterate passes the discrepancy test.
    pub fn satisfies_discrepancy(&self, tau: f64, delta: f64) -> bool {
        self.final_residual() <= tau * delta
    }
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if delta.is_finite() && delta >= 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("noise level must be nonnegative, got {delta}")))
    }
}

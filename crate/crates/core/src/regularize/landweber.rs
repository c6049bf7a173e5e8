//! Landweber iteration `φ_{k+1} = φ_k + ω K*(f^δ - Kφ_k)`.

use std::time::Instant;

use crate::ccbm::ForwardOperator;
use crate::error::{Error, Result};
use crate::fields::{BoundaryPair, DomainField};

use super::{check_delta, estimate_op_norm, Method, RunReport, StopReason, StoppingConfig};

const NORM_ITERS: usize = 60;
const NORM_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSize {
    /// `ω = 1 / ‖K‖²_est`.
    Auto,
    Fixed(f64),
}

pub fn landweber_solve<O: ForwardOperator + ?Sized>(
    op: &O,
    f_delta: &DomainField,
    delta: f64,
    cfg: &StoppingConfig,
    step: StepSize,
) -> Result<RunReport> {
    cfg.validate()?;
    check_delta(delta)?;
    if f_delta.len() != op.field_dim() {
        return Err(Error::dim("Landweber right-hand side", op.field_dim(), f_delta.len()));
    }
    if !f_delta.is_finite() {
        return Err(Error::NonFinite { step: 0, what: "right-hand side" });
    }
    let started = Instant::now();
    let norm_est = estimate_op_norm(op, NORM_ITERS, NORM_SEED)?;
    let omega = match step {
        StepSize::Auto if norm_est > 0.0 => 1.0 / (norm_est * norm_est),
        StepSize::Auto => 1.0,
        StepSize::Fixed(w) => {
            let limit = 2.0 / (norm_est * norm_est);
            if !(w > 0.0 && w < limit) {
                return Err(Error::Parameter(format!(
                    "Landweber step {w} outside (0, {limit:.6e})"
                )));
            }
            w
        }
    };

    let threshold = cfg.tau * delta;
    let mut phi = BoundaryPair::zeros(op.pair_dim());
    let mut residual = f_delta.clone();
    let mut history = vec![op.field_norm(&residual)];
    let mut k = 0;
    let stop_reason = loop {
        if *history.last().unwrap() <= threshold {
            break StopReason::Discrepancy;
        }
        if k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        let mut dir = op.adjoint(&residual)?;
        dir.scale(omega);
        let kdir = op.apply(&dir)?;
        phi.axpy(1.0, &dir);
        residual.axpy(-1.0, &kdir);
        k += 1;
        let r = op.field_norm(&residual);
        if !r.is_finite() {
            return Err(Error::NonFinite { step: k, what: "residual" });
        }
        history.push(r);
    };

    Ok(RunReport {
        method: Method::Landweber,
        k_delta: k,
        phi,
        residual_history: history,
        gkb: None,
        stop_reason,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

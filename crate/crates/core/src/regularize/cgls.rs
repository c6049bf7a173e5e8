//! Conjugate gradients on the normal equation `K*Kφ = K*f^δ`, in factored
//! form and in the weighted inner products of the operator.

use std::time::Instant;

use crate::ccbm::ForwardOperator;
use crate::error::{Error, Result};
use crate::fields::{BoundaryPair, DomainField};

use super::{check_delta, Method, RunReport, StopReason, StoppingConfig};

pub fn cgls_solve<O: ForwardOperator + ?Sized>(
    op: &O,
    f_delta: &DomainField,
    delta: f64,
    cfg: &StoppingConfig,
) -> Result<RunReport> {
    cfg.validate()?;
    check_delta(delta)?;
    if f_delta.len() != op.field_dim() {
        return Err(Error::dim("CGLS right-hand side", op.field_dim(), f_delta.len()));
    }
    if !f_delta.is_finite() {
        return Err(Error::NonFinite { step: 0, what: "right-hand side" });
    }
    let started = Instant::now();
    let threshold = cfg.tau * delta;
    let gamma1 = op.field_norm(f_delta);
    let eps = cfg.breakdown_eps;

    let mut phi = BoundaryPair::zeros(op.pair_dim());
    let mut residual = f_delta.clone();
    let mut history = vec![gamma1];
    let mut k = 0;
    let mut s = BoundaryPair::zeros(op.pair_dim());
    let mut s_norm0 = 0.0;
    let mut s_sq = 0.0;
    if gamma1 > threshold {
        s = op.adjoint(&residual)?;
        s_sq = op.pair_inner(&s, &s);
        s_norm0 = s_sq.sqrt();
    }
    let mut dir = s.clone();

    let stop_reason = loop {
        if *history.last().unwrap() <= threshold {
            break StopReason::Discrepancy;
        }
        if k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        if s_sq.sqrt() <= eps * s_norm0 || s_sq == 0.0 {
            break StopReason::Breakdown;
        }
        let q = op.apply(&dir)?;
        let q_sq = op.field_inner(&q, &q);
        if q_sq.sqrt() <= eps * gamma1 {
            break StopReason::Breakdown;
        }
        let alpha = s_sq / q_sq;
        phi.axpy(alpha, &dir);
        residual.axpy(-alpha, &q);
        k += 1;
        let r = op.field_norm(&residual);
        if !(r.is_finite() && alpha.is_finite()) {
            return Err(Error::NonFinite { step: k, what: "CGLS iterate" });
        }
        history.push(r);

        s = op.adjoint(&residual)?;
        let s_sq_next = op.pair_inner(&s, &s);
        let beta = s_sq_next / s_sq;
        s_sq = s_sq_next;
        let mut next = s.clone();
        next.axpy(beta, &dir);
        dir = next;
    };

    Ok(RunReport {
        method: Method::Cgls,
        k_delta: k,
        phi,
        residual_history: history,
        gkb: None,
        stop_reason,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

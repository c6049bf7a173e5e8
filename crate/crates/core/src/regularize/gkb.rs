//! Generalized Golub-Kahan bidiagonalization with an incremental Givens QR
//! of the lower-bidiagonal projection `G_k`.
//!
//! The recurrences run in the weighted inner products of the operator, so
//! `v_j` are orthonormal in `L²(Ω)` and `p_j` in the boundary space. After
//! step `j` the iterate `φ_j` minimizes `‖Kφ - f^δ‖` over
//! `span{p_1, ..., p_j}` and `|μ̄_{j+1}|` is its residual.

use std::time::Instant;

use crate::block_solver::singular_values;
use crate::ccbm::ForwardOperator;
use crate::error::{Error, Result};
use crate::fields::{BoundaryPair, DomainField};

use super::{check_delta, GkbDiagnostics, Method, RunReport, StopReason, StoppingConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkbOptions {
    /// Two-pass modified Gram-Schmidt against all previous basis vectors.
    pub reorthogonalize: bool,
    /// Reorthogonalization is applied only while `j` does not exceed this.
    pub reorth_limit: usize,
    pub breakdown_eps: f64,
}

impl Default for GkbOptions {
    fn default() -> Self {
        GkbOptions {
            reorthogonalize: true,
            reorth_limit: 200,
            breakdown_eps: 1e-14,
        }
    }
}

#[derive(Debug, Clone)]
pub struct GkbState {
    /// `γ_1 ..= γ_{k+1}`, all positive.
    pub gammas: Vec<f64>,
    /// `β_1 ..= β_{k+1}`, all positive.
    pub betas: Vec<f64>,
    pub v: Vec<DomainField>,
    pub p: Vec<BoundaryPair>,
    /// Search direction `q_{k+1}`.
    pub q: BoundaryPair,
    pub tau_bar: f64,
    /// Signed `μ̄_{k+1}`.
    pub mu_bar: f64,
    /// Current iterate `φ_k`.
    pub phi: BoundaryPair,
    /// `|μ̄_1| ..= |μ̄_{k+1}|`, i.e. the residual of `φ_0 ..= φ_k`.
    pub residual_history: Vec<f64>,
    pub k: usize,
    weighted_v: Vec<DomainField>,
    weighted_p: Vec<BoundaryPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GkbStep {
    /// `φ_k` was produced and the next basis vectors are available.
    Continue,
    /// `φ_k` was produced but the process cannot be continued.
    Breakdown,
}

/// Stepwise GKB iteration over a borrowed operator.
pub struct Gkb<'a, O: ForwardOperator + ?Sized> {
    op: &'a O,
    opts: GkbOptions,
    state: GkbState,
    gamma1: f64,
    exhausted: bool,
}

impl<'a, O: ForwardOperator + ?Sized> Gkb<'a, O> {
    /// Initialization: `γ1 v1 = f^δ`, `β1 p1 = K* v1`, `q1 = p1`.
    pub fn start(op: &'a O, f_delta: &DomainField, opts: GkbOptions) -> Result<Self> {
        if f_delta.len() != op.field_dim() {
            return Err(Error::dim("GKB right-hand side", op.field_dim(), f_delta.len()));
        }
        if !f_delta.is_finite() {
            return Err(Error::NonFinite { step: 0, what: "right-hand side" });
        }
        let np = op.pair_dim();
        let gamma1 = op.field_norm(f_delta);
        let state = GkbState {
            gammas: Vec::new(),
            betas: Vec::new(),
            v: Vec::new(),
            p: Vec::new(),
            q: BoundaryPair::zeros(np),
            tau_bar: 0.0,
            mu_bar: gamma1,
            phi: BoundaryPair::zeros(np),
            residual_history: vec![gamma1],
            k: 0,
            weighted_v: Vec::new(),
            weighted_p: Vec::new(),
        };
        let mut gkb = Gkb {
            op,
            opts,
            state,
            gamma1,
            exhausted: false,
        };
        if gamma1 == 0.0 {
            gkb.exhausted = true;
            return Ok(gkb);
        }
        let v1 = f_delta.scaled(1.0 / gamma1);
        gkb.push_v(gamma1, v1);

        let kv = op.adjoint(&gkb.state.v[0])?;
        let beta1 = op.pair_norm(&kv);
        if !beta1.is_finite() {
            return Err(Error::NonFinite { step: 0, what: "beta" });
        }
        if beta1 <= opts.breakdown_eps * gamma1 {
            gkb.exhausted = true;
            return Ok(gkb);
        }
        gkb.push_p(beta1, kv.scaled(1.0 / beta1));
        gkb.state.q = gkb.state.p[0].clone();
        gkb.state.tau_bar = beta1;
        Ok(gkb)
    }

    pub fn state(&self) -> &GkbState {
        &self.state
    }

    pub fn into_state(self) -> GkbState {
        self.state
    }

    /// Residual `‖Kφ_k - f^δ‖` of the current iterate.
    pub fn residual(&self) -> f64 {
        *self.state.residual_history.last().unwrap()
    }

    /// False once no further step can be taken.
    pub fn can_continue(&self) -> bool {
        !self.exhausted
    }

    fn push_v(&mut self, gamma: f64, v: DomainField) {
        self.state.weighted_v.push(self.op.weight_field(&v));
        self.state.gammas.push(gamma);
        self.state.v.push(v);
    }

    fn push_p(&mut self, beta: f64, p: BoundaryPair) {
        self.state.weighted_p.push(self.op.weight_pair(&p));
        self.state.betas.push(beta);
        self.state.p.push(p);
    }

    fn reorth_active(&self, j: usize) -> bool {
        self.opts.reorthogonalize && j <= self.opts.reorth_limit
    }

    /// Advances from `φ_{j-1}` to `φ_j`, `j = k + 1`.
    pub fn step(&mut self) -> Result<GkbStep> {
        if self.exhausted {
            return Ok(GkbStep::Breakdown);
        }
        let j = self.state.k + 1;
        let eps = self.opts.breakdown_eps * self.gamma1;
        let beta_j = self.state.betas[j - 1];

        // γ_{j+1} v_{j+1} = K p_j - β_j v_j
        let mut u = self.op.apply(&self.state.p[j - 1])?;
        u.axpy(-beta_j, &self.state.v[j - 1]);
        if self.reorth_active(j) {
            for _ in 0..2 {
                for (v, mv) in self.state.v.iter().zip(&self.state.weighted_v) {
                    let c = mv.dot(&u);
                    u.axpy(-c, v);
                }
            }
        }
        let gamma_next = self.op.field_norm(&u);
        if !gamma_next.is_finite() {
            return Err(Error::NonFinite { step: j, what: "gamma" });
        }
        let gamma_vanished = gamma_next <= eps;
        let gamma_next = if gamma_vanished { 0.0 } else { gamma_next };

        // Givens rotation eliminating γ_{j+1}
        let st = &mut self.state;
        let tau = st.tau_bar.hypot(gamma_next);
        let (c, s) = (st.tau_bar / tau, gamma_next / tau);
        let mu = c * st.mu_bar;
        st.mu_bar *= -s;
        st.phi.axpy(mu / tau, &st.q);
        st.k = j;
        st.residual_history.push(st.mu_bar.abs());
        if !(tau.is_finite() && st.mu_bar.is_finite()) || !st.phi.is_finite() {
            return Err(Error::NonFinite { step: j, what: "iterate" });
        }
        if gamma_vanished {
            self.exhausted = true;
            return Ok(GkbStep::Breakdown);
        }
        self.push_v(gamma_next, u.scaled(1.0 / gamma_next));

        // β_{j+1} p_{j+1} = K* v_{j+1} - γ_{j+1} p_j
        let mut w = self.op.adjoint(&self.state.v[j])?;
        w.axpy(-gamma_next, &self.state.p[j - 1]);
        if self.reorth_active(j) {
            for _ in 0..2 {
                for (p, cp) in self.state.p.iter().zip(&self.state.weighted_p) {
                    let c = cp.dot(&w);
                    w.axpy(-c, p);
                }
            }
        }
        let beta_next = self.op.pair_norm(&w);
        if !beta_next.is_finite() {
            return Err(Error::NonFinite { step: j, what: "beta" });
        }
        if beta_next <= eps {
            self.exhausted = true;
            return Ok(GkbStep::Breakdown);
        }
        self.push_p(beta_next, w.scaled(1.0 / beta_next));

        let st = &mut self.state;
        let eta = s * beta_next;
        st.tau_bar = c * beta_next;
        let mut q = st.p[j].clone();
        q.axpy(-eta / tau, &st.q);
        st.q = q;
        Ok(GkbStep::Continue)
    }
}

/// Runs GKB until the discrepancy principle, a breakdown or `max_iter`.
pub fn gkb_solve<O: ForwardOperator + ?Sized>(
    op: &O,
    f_delta: &DomainField,
    delta: f64,
    cfg: &StoppingConfig,
    reorthogonalize: bool,
) -> Result<RunReport> {
    cfg.validate()?;
    check_delta(delta)?;
    let started = Instant::now();
    let opts = GkbOptions {
        reorthogonalize,
        breakdown_eps: cfg.breakdown_eps,
        ..GkbOptions::default()
    };
    let mut gkb = Gkb::start(op, f_delta, opts)?;
    let threshold = cfg.tau * delta;

    let stop_reason = loop {
        if gkb.residual() <= threshold {
            break StopReason::Discrepancy;
        }
        if !gkb.can_continue() {
            break StopReason::Breakdown;
        }
        if gkb.state().k >= cfg.max_iter {
            break StopReason::MaxIter;
        }
        gkb.step()?;
    };

    let state = gkb.into_state();
    Ok(RunReport {
        method: Method::Gkb,
        k_delta: state.k,
        phi: state.phi,
        residual_history: state.residual_history,
        gkb: Some(GkbDiagnostics {
            gammas: state.gammas,
            betas: state.betas,
            condition_numbers: None,
        }),
        stop_reason,
        wall_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// The `(j+1) x j` lower-bidiagonal matrix `G_j` with diagonal `β_1..β_j`
/// and subdiagonal `γ_2..γ_{j+1}`.
pub fn bidiagonal_matrix(gammas: &[f64], betas: &[f64], j: usize) -> Result<Vec<Vec<f64>>> {
    if gammas.len() < j + 1 || betas.len() < j {
        return Err(Error::Parameter(format!(
            "G_{j} needs {} gammas and {j} betas, have {} and {}",
            j + 1,
            gammas.len(),
            betas.len()
        )));
    }
    let mut g = vec![vec![0.0; j]; j + 1];
    for i in 0..j {
        g[i][i] = betas[i];
        g[i + 1][i] = gammas[i + 1];
    }
    Ok(g)
}

/// `κ2(G_j)` for `j = 1..=up_to`; `+∞` when `σ_min < 1e-30`.
pub fn gkb_condition_numbers(gammas: &[f64], betas: &[f64], up_to: usize) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(up_to);
    for j in 1..=up_to {
        let g = bidiagonal_matrix(gammas, betas, j)?;
        let sigma = singular_values(&g);
        let (max, min) = (sigma[0], *sigma.last().unwrap());
        let kappa = if min < 1e-30 { f64::INFINITY } else { max / min };
        let bound = ((betas[0].powi(2) + gammas[1].powi(2))
            / (betas[j - 1].powi(2) + gammas[j].powi(2)))
        .sqrt();
        debug_assert!(
            kappa >= bound * (1.0 - 1e-10),
            "κ2(G_{j}) = {kappa} below the lower bound {bound}"
        );
        out.push(kappa);
    }
    Ok(out)
}

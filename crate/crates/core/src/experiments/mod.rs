//! Benchmark experiments: exact data, multiplicative noise, solver runs and
//! relative errors of the recovered traces.

mod cases;
mod output;

use std::path::PathBuf;
use std::thread;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block_solver::{singular_values, spectral_norm};
use crate::ccbm::{norm_qu, CauchyData, CcbmOperator, ForwardOperator};
use crate::error::{Error, Result};
use crate::fem::FemSystem;
use crate::fields::{BoundaryPair, DomainField};
use crate::mesh::{generate_annulus, Mesh};
use crate::regularize::{
    bidiagonal_matrix, cgls_solve, gkb_condition_numbers, gkb_solve, landweber_solve, Gkb,
    GkbOptions, Method, RunReport, StepSize, StoppingConfig,
};

pub use cases::{evaluate_case, BenchmarkCase, CaseId, R1, R2};
pub use output::{
    write_curve_csv, write_diagnostics_csv, write_reports, CurvePoint, DiagnosticRow, ReportRow,
};

/// Component tags of the noise streams.
const NOISE_TAG_PHI: u64 = 0;
const NOISE_TAG_T: u64 = 1;

/// Uniform draw in `[0, 1)` for one node and data component.
///
/// ChaCha8 keyed by `seed`, with the component as stream id and the global
/// node index as word position, so a node's draw does not depend on which
/// other nodes exist.
fn node_uniform(seed: u64, tag: u64, node: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(tag);
    rng.set_word_pos(2 * node as u128);
    rng.random::<f64>()
}

/// Multiplies every `Φ` and `T` value by `1 + δ'(2 rand - 1)`.
///
/// The returned data carry `delta_prime`; `delta` is left at zero until the
/// noise level in `L²(Ω)` is measured with [`noise_level`].
pub fn add_noise(data: &CauchyData, delta_prime: f64, seed: u64) -> Result<CauchyData> {
    if !(delta_prime.is_finite() && delta_prime >= 0.0) {
        return Err(Error::Parameter(format!("noise level must be nonnegative, got {delta_prime}")));
    }
    let perturb = |values: &[f64], tag: u64| -> Vec<f64> {
        values
            .iter()
            .zip(&data.nodes)
            .map(|(&v, &node)| (1.0 + delta_prime * 2.0 * (node_uniform(seed, tag, node) - 0.5)) * v)
            .collect()
    };
    Ok(CauchyData {
        nodes: data.nodes.clone(),
        phi_m: perturb(&data.phi_m, NOISE_TAG_PHI),
        t_m: perturb(&data.t_m, NOISE_TAG_T),
        delta_prime,
        delta: 0.0,
    })
}

/// `‖f^δ - f‖` in `L²(Ω)`.
pub fn noise_level<O: ForwardOperator + ?Sized>(op: &O, f_delta: &DomainField, f: &DomainField) -> f64 {
    op.field_norm(&f_delta.sub(f))
}

/// `(‖φ - φ†‖ / ‖φ†‖, ‖t - t†‖ / ‖t†‖)` in `L²(Γ_u)`.
pub fn relative_errors(fem: &FemSystem, rec: &BoundaryPair, truth: &BoundaryPair) -> Result<(f64, f64)> {
    let zeros = vec![0.0; truth.len()];
    let part = |phi: &[f64], t: &[f64]| {
        norm_qu(fem, &BoundaryPair { phi: phi.to_vec(), t: t.to_vec() })
    };
    let diff = rec.sub(truth);
    let (nphi, nt) = (part(&truth.phi, &zeros)?, part(&zeros, &truth.t)?);
    if nphi == 0.0 || nt == 0.0 {
        return Err(Error::ZeroNorm);
    }
    Ok((part(&diff.phi, &zeros)? / nphi, part(&zeros, &diff.t)? / nt))
}

fn default_zeta() -> f64 {
    1.0
}

/// One experiment cell. Keys are flat so the JSON form can be scripted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub case: CaseId,
    #[serde(default = "default_zeta")]
    pub zeta: f64,
    pub r1: f64,
    pub r2: f64,
    pub n_theta: usize,
    pub n_r: usize,
    pub delta_prime: f64,
    pub seed: u64,
    pub method: Method,
    pub tau: f64,
    pub max_iter: usize,
    pub breakdown_eps: f64,
    pub reorthogonalize: bool,
    /// Landweber step; `None` selects `1 / ‖K‖²_est`.
    pub omega: Option<f64>,
    /// Attach `κ2(G_j)` to GKB reports.
    pub condition_numbers: bool,
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let stop = StoppingConfig::default();
        ExperimentConfig {
            case: CaseId::Example1,
            zeta: 1.0,
            r1: R1,
            r2: R2,
            n_theta: 100,
            n_r: 19,
            delta_prime: 0.01,
            seed: 7,
            method: Method::Gkb,
            tau: stop.tau,
            max_iter: stop.max_iter,
            breakdown_eps: stop.breakdown_eps,
            reorthogonalize: true,
            omega: None,
            condition_numbers: false,
            out: None,
        }
    }
}

impl ExperimentConfig {
    pub fn stopping(&self) -> StoppingConfig {
        StoppingConfig {
            tau: self.tau,
            max_iter: self.max_iter,
            breakdown_eps: self.breakdown_eps,
        }
    }

    pub fn benchmark(&self) -> Result<BenchmarkCase> {
        BenchmarkCase::new(self.case, self.zeta)
    }

    pub fn validate(&self) -> Result<()> {
        self.benchmark()?;
        self.stopping().validate()?;
        if !(self.delta_prime.is_finite() && self.delta_prime >= 0.0) {
            return Err(Error::Parameter(format!(
                "delta_prime must be nonnegative, got {}",
                self.delta_prime
            )));
        }
        if let Some(w) = self.omega {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Parameter(format!("omega must be positive, got {w}")));
            }
        }
        Ok(())
    }
}

/// Mesh, operator and data shared by every method of one cell.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub case: BenchmarkCase,
    pub mesh: Mesh,
    pub op: CcbmOperator,
    pub exact: CauchyData,
    pub noisy: CauchyData,
    pub truth: BoundaryPair,
    pub f: DomainField,
    pub f_delta: DomainField,
    pub delta: f64,
}

/// Mesh, assembly, factorization, exact and noisy data, and `δ`.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Prepared> {
    cfg.validate()?;
    let case = cfg.benchmark()?;
    let mesh = generate_annulus(cfg.r1, cfg.r2, cfg.n_theta, cfg.n_r)?;
    let (exact, truth) = evaluate_case(&case, &mesh)?;
    let op = CcbmOperator::from_mesh(&mesh, case.fem_zeta())?;
    let mut noisy = add_noise(&exact, cfg.delta_prime, cfg.seed)?;
    let f = op.compute_rhs(&exact)?;
    let f_delta = op.compute_rhs(&noisy)?;
    let delta = noise_level(&op, &f_delta, &f);
    noisy.delta = delta;
    Ok(Prepared { case, mesh, op, exact, noisy, truth, f, f_delta, delta })
}

/// A solver run together with its errors against the true traces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub case: CaseId,
    pub zeta: f64,
    pub delta_prime: f64,
    pub seed: u64,
    pub tau: f64,
    pub delta: f64,
    pub err_phi: f64,
    pub err_t: f64,
    pub run: RunReport,
}

impl ExperimentReport {
    pub fn row(&self) -> ReportRow {
        ReportRow {
            case: self.case.to_string(),
            method: self.run.method.to_string(),
            delta_prime: self.delta_prime,
            seed: self.seed,
            tau: self.tau,
            k_delta: self.run.k_delta,
            err_phi: self.err_phi,
            err_t: self.err_t,
            delta: self.delta,
            stop_reason: self.run.stop_reason.to_string(),
            wall_ms: self.run.wall_ms,
        }
    }
}

/// Solves the prepared cell with one method.
pub fn run_method(prep: &Prepared, cfg: &ExperimentConfig, method: Method) -> Result<ExperimentReport> {
    let stop = cfg.stopping();
    let mut run = match method {
        Method::Gkb => gkb_solve(&prep.op, &prep.f_delta, prep.delta, &stop, cfg.reorthogonalize)?,
        Method::Cgls => cgls_solve(&prep.op, &prep.f_delta, prep.delta, &stop)?,
        Method::Landweber => {
            let step = cfg.omega.map_or(StepSize::Auto, StepSize::Fixed);
            landweber_solve(&prep.op, &prep.f_delta, prep.delta, &stop, step)?
        }
    };
    if cfg.condition_numbers {
        if let Some(diag) = run.gkb.as_mut() {
            let up_to = run.k_delta.min(diag.gammas.len().saturating_sub(1));
            diag.condition_numbers = Some(gkb_condition_numbers(&diag.gammas, &diag.betas, up_to)?);
        }
    }
    let (err_phi, err_t) = relative_errors(prep.op.fem(), &run.phi, &prep.truth)?;
    Ok(ExperimentReport {
        case: cfg.case,
        zeta: cfg.zeta,
        delta_prime: cfg.delta_prime,
        seed: cfg.seed,
        tau: cfg.tau,
        delta: prep.delta,
        err_phi,
        err_t,
        run,
    })
}

/// Full pipeline for the configured method.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let prep = prepare(cfg)?;
    run_method(&prep, cfg, cfg.method)
}

/// All three methods on identical data, solved concurrently. Reports come
/// back in the order of [`Method::ALL`].
pub fn compare_methods(cfg: &ExperimentConfig) -> Result<Vec<ExperimentReport>> {
    let prep = prepare(cfg)?;
    let results: Vec<Result<ExperimentReport>> = thread::scope(|s| {
        let handles: Vec<_> = Method::ALL
            .iter()
            .map(|&m| {
                let prep = &prep;
                s.spawn(move || run_method(prep, cfg, m))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect()
    });
    results.into_iter().collect()
}

/// GKB iterates `k = 0..=k_max` without the discrepancy stop, with errors
/// against the true traces. Shorter if the Krylov space is exhausted.
pub fn semiconvergence_curve(cfg: &ExperimentConfig, k_max: usize) -> Result<Vec<CurvePoint>> {
    let prep = prepare(cfg)?;
    semiconvergence_from(&prep, cfg, k_max)
}

pub fn semiconvergence_from(prep: &Prepared, cfg: &ExperimentConfig, k_max: usize) -> Result<Vec<CurvePoint>> {
    let opts = GkbOptions {
        reorthogonalize: cfg.reorthogonalize,
        breakdown_eps: cfg.breakdown_eps,
        ..GkbOptions::default()
    };
    let mut gkb = Gkb::start(&prep.op, &prep.f_delta, opts)?;
    let mut points = Vec::with_capacity(k_max + 1);
    loop {
        let st = gkb.state();
        let (err_phi, err_t) = relative_errors(prep.op.fem(), &st.phi, &prep.truth)?;
        points.push(CurvePoint { k: st.k, err_phi, err_t, residual: gkb.residual() });
        if st.k >= k_max || !gkb.can_continue() {
            break;
        }
        gkb.step()?;
    }
    Ok(points)
}

/// Bidiagonalization coefficients and `‖G_k‖₂`, `κ2(G_k)` for `k = 1..=k_max`.
pub fn assumption_diagnostics(cfg: &ExperimentConfig, k_max: usize) -> Result<Vec<DiagnosticRow>> {
    let prep = prepare(cfg)?;
    diagnostics_from(&prep, cfg, k_max)
}

pub fn diagnostics_from(prep: &Prepared, cfg: &ExperimentConfig, k_max: usize) -> Result<Vec<DiagnosticRow>> {
    let opts = GkbOptions {
        reorthogonalize: cfg.reorthogonalize,
        breakdown_eps: cfg.breakdown_eps,
        ..GkbOptions::default()
    };
    let mut gkb = Gkb::start(&prep.op, &prep.f_delta, opts)?;
    while gkb.state().k < k_max && gkb.can_continue() {
        gkb.step()?;
    }
    let st = gkb.state();
    let available = st.betas.len().min(st.gammas.len().saturating_sub(1)).min(k_max);
    let mut rows = Vec::with_capacity(available);
    for k in 1..=available {
        let g = bidiagonal_matrix(&st.gammas, &st.betas, k)?;
        let sigma = singular_values(&g);
        let min = *sigma.last().unwrap();
        rows.push(DiagnosticRow {
            k,
            gamma: st.gammas[k - 1],
            beta: st.betas[k - 1],
            g_norm: spectral_norm(&g),
            kappa: if min < 1e-30 { f64::INFINITY } else { sigma[0] / min },
        });
    }
    Ok(rows)
}

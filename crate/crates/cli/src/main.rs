//! `ccbm` command-line interface.
//!
//! Exit status: 0 on success, 1 on invalid input, 2 on numerical failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ccbm::experiments::{
    compare_methods, diagnostics_from, prepare, run_method, semiconvergence_from, write_curve_csv,
    write_diagnostics_csv, write_reports, CaseId, ExperimentConfig, ExperimentReport,
};
use ccbm::mesh::generate_annulus;
use ccbm::regularize::Method;
use ccbm::Error;

#[derive(Debug, Parser)]
#[command(name = "ccbm", version, about = "Cauchy data completion on an annulus by CCBM and Golub-Kahan bidiagonalization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a structured annulus mesh in the native text format.
    Mesh(MeshArgs),
    /// Solve one benchmark cell with one method.
    Run(RunArgs),
    /// Solve one benchmark cell with landweber, cgls and gkb on identical data.
    Compare(CommonArgs),
    /// Bidiagonalization diagnostics and the semi-convergence curve of GKB.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
struct MeshArgs {
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    #[arg(long, default_value_t = 2.0)]
    r2: f64,
    #[arg(long, default_value_t = 100)]
    ntheta: usize,
    #[arg(long, default_value_t = 19)]
    nr: usize,
    #[arg(long)]
    out: PathBuf,
}

/// Experiment settings shared by the solver subcommands. Unset flags fall
/// back to the config file, then to the built-in defaults.
#[derive(Debug, Args)]
struct CommonArgs {
    /// JSON file with experiment keys (case, zeta, n_theta, n_r, delta_prime,
    /// seed, method, tau, max_iter, breakdown_eps, reorthogonalize, omega, ...)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Benchmark case: 1, 2 or 3 [default: 1]
    #[arg(long)]
    case: Option<String>,
    /// Diffusion ratio of example 3 [default: 1]
    #[arg(long)]
    zeta: Option<f64>,
    /// Relative noise level δ' [default: 0.01]
    #[arg(long)]
    noise: Option<f64>,
    /// Noise seed [default: 7]
    #[arg(long)]
    seed: Option<u64>,
    /// Discrepancy factor τ > 1 [default: 1.01]
    #[arg(long)]
    tau: Option<f64>,
    /// Iteration cap [default: 2000]
    #[arg(long = "max-iter")]
    max_iter: Option<usize>,
    /// Angular mesh resolution [default: 100]
    #[arg(long)]
    ntheta: Option<usize>,
    /// Radial mesh resolution [default: 19]
    #[arg(long)]
    nr: Option<usize>,
    /// Landweber step size [default: 1/‖K‖² estimate]
    #[arg(long)]
    omega: Option<f64>,
    /// Disable reorthogonalization in GKB
    #[arg(long = "no-reorth")]
    no_reorth: bool,
    /// Write wall_ms = 0 so repeated runs give identical files
    #[arg(long = "no-timing")]
    no_timing: bool,
    /// Output directory [default: ccbm-out]
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// gkb, landweber or cgls [default: gkb]
    #[arg(long)]
    method: Option<String>,
    /// Attach κ2(G_j) to GKB reports
    #[arg(long = "condition-numbers")]
    condition_numbers: bool,
}

#[derive(Debug, Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of GKB steps
    #[arg(long, default_value_t = 25)]
    kmax: usize,
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Parameter(format!("config {}: {e}", path.display())))
}

impl CommonArgs {
    fn resolve(&self) -> Result<ExperimentConfig, Error> {
        let mut cfg = match &self.config {
            Some(path) => load_config(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(c) = &self.case {
            cfg.case = c.parse::<CaseId>()?;
        }
        if let Some(v) = self.zeta {
            cfg.zeta = v;
        }
        if let Some(v) = self.noise {
            cfg.delta_prime = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.tau {
            cfg.tau = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.ntheta {
            cfg.n_theta = v;
        }
        if let Some(v) = self.nr {
            cfg.n_r = v;
        }
        if self.omega.is_some() {
            cfg.omega = self.omega;
        }
        if self.no_reorth {
            cfg.reorthogonalize = false;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn out_dir(cfg: &ExperimentConfig) -> PathBuf {
    cfg.out.clone().unwrap_or_else(|| PathBuf::from("ccbm-out"))
}

fn finish(mut reports: Vec<ExperimentReport>, no_timing: bool, dir: &Path, stem: &str) -> Result<(), Error> {
    if no_timing {
        for r in &mut reports {
            r.run.wall_ms = 0.0;
        }
    }
    write_reports(dir, stem, &reports)?;
    for r in &reports {
        println!(
            "{} {} delta'={} k={} err_phi={:.4e} err_t={:.4e} stop={}",
            r.case, r.run.method, r.delta_prime, r.run.k_delta, r.err_phi, r.err_t, r.run.stop_reason
        );
    }
    println!("wrote {}", dir.join(format!("{stem}.csv")).display());
    Ok(())
}

fn execute(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Mesh(a) => {
            let mesh = generate_annulus(a.r1, a.r2, a.ntheta, a.nr)?;
            if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            mesh.write_native(&a.out)?;
            println!(
                "wrote {} ({} nodes, {} triangles, h = {:.4})",
                a.out.display(),
                mesh.n_nodes(),
                mesh.n_triangles(),
                mesh.h
            );
            Ok(())
        }
        Command::Run(a) => {
            let mut cfg = a.common.resolve()?;
            if let Some(m) = &a.method {
                cfg.method = m.parse::<Method>()?;
            }
            cfg.condition_numbers |= a.condition_numbers;
            let prep = prepare(&cfg)?;
            let report = run_method(&prep, &cfg, cfg.method)?;
            finish(vec![report], a.common.no_timing, &out_dir(&cfg), "report")
        }
        Command::Compare(a) => {
            let cfg = a.resolve()?;
            let reports = compare_methods(&cfg)?;
            finish(reports, a.no_timing, &out_dir(&cfg), "compare")
        }
        Command::Diagnose(a) => {
            let cfg = a.common.resolve()?;
            let prep = prepare(&cfg)?;
            let rows = diagnostics_from(&prep, &cfg, a.kmax)?;
            let curve = semiconvergence_from(&prep, &cfg, a.kmax)?;
            let dir = out_dir(&cfg);
            fs::create_dir_all(&dir)?;
            write_diagnostics_csv(&dir.join("diagnostics.csv"), &rows)?;
            write_curve_csv(&dir.join("semiconvergence.csv"), &curve)?;
            println!("wrote {} and {}", dir.join("diagnostics.csv").display(), dir.join("semiconvergence.csv").display());
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.to_string();
            let line = rendered.lines().find(|l| !l.trim().is_empty()).unwrap_or("invalid arguments");
            eprintln!("{}", line.trim());
            return ExitCode::from(1);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}

//! Command-line front end: `radialcone check|run|mms|sweep --config <path> [--out <dir>] [--jobs <k>]`.
//!
//! Exit codes: 0 success, 1 acceptance or harness failure, 2 hypothesis failure,
//! 3 blow-up suspected, 64 configuration error.

pub mod config;
pub mod output;
pub mod run;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::mms::{convergence_study, MmsError};
use crate::nonlinearity::{check_hypotheses, HypothesisReport};
use crate::solver::SolverError;

pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ACCEPTANCE: i32 = 1;
pub const EXIT_HYPOTHESIS: i32 = 2;
pub const EXIT_BLOWUP: i32 = 3;
pub const EXIT_CONFIG: i32 = 64;

#[derive(Debug, Error, Clone)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Solver(SolverError),
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Solver(e)
    }
}

impl From<MmsError> for CliError {
    fn from(e: MmsError) -> Self {
        match e {
            MmsError::Solver(s) => CliError::Solver(s),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Io(_) => EXIT_ACCEPTANCE,
            CliError::Solver(SolverError::BlowUpSuspected { .. } | SolverError::NonFinite { .. }) => EXIT_BLOWUP,
            CliError::Solver(_) => EXIT_CONFIG,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "radialcone",
    version,
    about = "Radial wave-map solver with light-cone diagnostics",
    after_help = "Exit codes: 0 success, 1 acceptance failure, 2 hypothesis failure, 3 blow-up suspected, 64 configuration error.\nThe RADIALCONE_SEED environment variable is reserved for stochastic data families and currently unused."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the structural hypotheses on the configured model.
    Check(CommonArgs),
    /// Evolve the configured data and write series, slices and the diagnostic report.
    Run(CommonArgs),
    /// Run the manufactured-solution convergence study.
    Mms(CommonArgs),
    /// Run every point of the configured parameter grid.
    Sweep(CommonArgs),
}

#[derive(Debug, clap::Args)]
struct CommonArgs {
    /// TOML configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, overriding `output.dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps and convergence studies (default: available parallelism).
    #[arg(long)]
    jobs: Option<usize>,
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (cmd, args) = match &cli.command {
        Command::Check(a) => ("check", a),
        Command::Run(a) => ("run", a),
        Command::Mms(a) => ("mms", a),
        Command::Sweep(a) => ("sweep", a),
    };
    let cfg = match RunConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output.dir));
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = args.jobs {
        pool = pool.num_threads(jobs);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start worker pool: {e}");
            return EXIT_ACCEPTANCE;
        }
    };
    let result = pool.install(|| match cmd {
        "check" => cmd_check(&cfg),
        "run" => cmd_run(&cfg, &out),
        "mms" => cmd_mms(&cfg, &out),
        _ => cmd_sweep(&cfg, &out),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

pub fn hypothesis_report(cfg: &RunConfig) -> Result<HypothesisReport, CliError> {
    let profile = cfg.model.profile()?;
    let params = crate::nonlinearity::ModelParams::new(cfg.model.n, cfg.model.alpha)
        .map_err(|e| CliError::Config(e.to_string()))?;
    check_hypotheses(&profile, &params, (cfg.check.range[0], cfg.check.range[1]), cfg.check.samples)
        .map_err(|e| CliError::Config(e.to_string()))
}

/// Prints the hypothesis report; exit 0 when every check passes, 2 otherwise.
pub fn cmd_check(cfg: &RunConfig) -> Result<i32, CliError> {
    let r = hypothesis_report(cfg)?;
    let flag = |ok: bool| if ok { "ok" } else { "FAILED" };
    println!("profile {} with n = {}, alpha = {}", r.profile, r.n, r.alpha);
    println!("alpha >= max{{2(n-1), n+1}} = {}: {}", r.alpha_threshold, flag(r.alpha_ok));
    println!("f(0) = 0: {}", flag(r.f_zero_ok));
    println!("f'(0) != 0: {} (f'(0) = {})", flag(r.f_prime_zero_ok), r.f_prime_at_zero);
    match r.sign_condition.witness {
        None => println!("u f(u) f'(u) >= 0 (sampled): ok"),
        Some(w) => println!("u f(u) f'(u) >= 0 (sampled): FAILED, witness u = {w}"),
    }
    match r.divergence.witness {
        None => println!("I(w) diverges (sampled, I(W)/I(W/2) = {:.4}): ok", r.divergence_growth_ratio),
        Some(w) => println!(
            "I(w) diverges (sampled, I(W)/I(W/2) = {:.4} at W = {w}): FAILED",
            r.divergence_growth_ratio
        ),
    }
    Ok(if r.all_ok() { EXIT_OK } else { EXIT_HYPOTHESIS })
}

/// Evolves, diagnoses and writes the run artifacts into `out`.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let result = run::execute(cfg)?;
    output::write_run(out, &result, &cfg.output)?;
    print!("{}", output::summary(&result.report));
    Ok(if result.blew_up() {
        EXIT_BLOWUP
    } else if result.report.acceptance.passed {
        EXIT_OK
    } else {
        EXIT_ACCEPTANCE
    })
}

/// Runs the convergence study on the configured model; exit 0 iff every order is in band.
pub fn cmd_mms(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let model = cfg.model.build()?;
    let case = cfg.mms.case(model);
    let rep = convergence_study(&case, &cfg.mms.levels, &cfg.mms.study())?;
    let [lo, hi] = cfg.mms.order_band;
    print!("{}", output::convergence_table(&rep));
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    output::write_text(&out.join(output::MMS_FILE), &output::to_json(&rep)?)?;
    output::write_text(&out.join(output::CONVERGENCE_FILE), &output::convergence_csv(&rep))?;
    if rep.within(lo, hi) {
        println!("all observed orders within [{lo}, {hi}]");
        Ok(EXIT_OK)
    } else {
        let worst = rep
            .max_orders()
            .into_iter()
            .flatten()
            .map(|p| if p < lo { lo - p } else { p - hi })
            .fold(0.0, f64::max);
        println!("REGRESSION: observed order outside [{lo}, {hi}], deficit {worst:.3}");
        Ok(EXIT_ACCEPTANCE)
    }
}

/// One row of `aggregate.csv`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub run: String,
    pub n: u32,
    pub alpha: f64,
    pub profile: String,
    pub amplitude: f64,
    /// `completed`, `blowup` or `failed`.
    pub status: String,
    pub blowup: bool,
    pub exit_code: i32,
    /// Space-separated sequences at the dyadic times, farthest from the apex first.
    pub tip_energy: String,
    pub sup_probe: String,
    pub flux_decay: String,
    pub message: String,
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(" ")
}

fn sweep_one(name: String, cfg: &RunConfig, dir: &Path) -> AggregateRow {
    let mut row = AggregateRow {
        run: name,
        n: cfg.model.n,
        alpha: cfg.model.alpha,
        profile: cfg.model.profile.clone(),
        amplitude: cfg.data.amplitude,
        status: "completed".into(),
        blowup: false,
        exit_code: EXIT_OK,
        tip_energy: String::new(),
        sup_probe: String::new(),
        flux_decay: String::new(),
        message: String::new(),
    };
    let result = run::execute(cfg).and_then(|r| output::write_run(dir, &r, &cfg.output).map(|_| r));
    match result {
        Ok(r) => {
            if let Some(d) = &r.report.dyadic {
                row.tip_energy = join(&d.scan.tip_energy);
                row.sup_probe = join(&d.scan.sup_probe);
                row.flux_decay = join(&d.scan.flux_decay);
            }
            if let Some(b) = &r.report.run.blowup {
                row.status = "blowup".into();
                row.blowup = true;
                row.exit_code = EXIT_BLOWUP;
                row.message = b.reason.to_string();
            } else if !r.report.acceptance.passed {
                row.exit_code = EXIT_ACCEPTANCE;
                row.message = "acceptance tolerances exceeded".into();
            }
        }
        Err(e) => {
            row.status = "failed".into();
            row.exit_code = e.exit_code();
            row.message = e.to_string();
        }
    }
    row
}

/// Runs every point of the parameter grid concurrently, each into its own directory, and
/// writes `aggregate.csv`. Failed runs are recorded, not fatal.
pub fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let sweep = cfg.sweep.clone().ok_or_else(|| CliError::Config("sweep needs a [sweep] section".into()))?;
    let runs = sweep.expand(cfg);
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    let rows: Vec<AggregateRow> = runs
        .par_iter()
        .enumerate()
        .map(|(k, run_cfg)| {
            let name = format!("run_{k:03}");
            let dir = out.join(&name);
            sweep_one(name, run_cfg, &dir)
        })
        .collect();
    let path = out.join(output::AGGREGATE_FILE);
    let mut w = csv::Writer::from_path(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for row in &rows {
        w.serialize(row).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    for row in &rows {
        println!("{} n={} alpha={} {} amplitude={}: {} {}", row.run, row.n, row.alpha, row.profile, row.amplitude, row.status, row.message);
    }
    Ok(EXIT_OK)
}

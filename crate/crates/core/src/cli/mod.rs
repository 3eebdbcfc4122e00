//! The `accperc` command line.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 a size or
//! feasibility guard rejected the request, 3 the verification suite failed.
//! Metadata lines on standard output start with `#`; everything else is CSV.

pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::io::render;
use crate::experiments::sweep::{build_pool, chunked_counts, count_hits};
use crate::experiments::{
    run_coupled_sweep, run_level_experiment, run_regime_sweep, run_sweep, run_verification_suite, Budget, Format,
    LevelRow, SuiteOptions, SweepConfig, SweepMode,
};
use crate::expr::HExpr;
use crate::model::ModelParams;
use crate::moments::{expected_paths, MomentReport};
use crate::oracle::{count_report, sample_full_tree};
use crate::sampler::{simulate_count_capped, simulate_exists, LevelConfig, TrialConfig, TrialMode};
use crate::stats::{StreamingStats, TrialEstimate, Z_95};
use crate::stream::derive_seed;

pub use config::{load_config, parse_config, LoadedConfig};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "ACCPERC_WORKERS";

#[derive(Parser, Debug)]
#[command(name = "accperc", version, about = "Accessibility percolation on regular n-ary trees")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lazy Monte Carlo estimate at one parameter point
    Simulate(SimulateArgs),
    /// Exhaustive counts over fully materialized trees
    Enumerate(EnumerateArgs),
    /// Closed-form moments and bounds
    Moments(MomentsArgs),
    /// Parameter sweep written as CSV or JSON
    Sweep(SweepArgs),
    /// Level-count (M_j) experiment
    Levels(LevelsArgs),
    /// Near-critical sweep with n = floor(((1 + beta_h)/e) h)
    Regime(RegimeArgs),
    /// Run the verification suite
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Branching {
    /// Branching ratio alpha; n = floor(alpha h)
    #[arg(long)]
    alpha: Option<f64>,
    /// Number of children per vertex
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    branching: Branching,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    /// Count paths (capped at this value) instead of deciding existence
    #[arg(long)]
    cap: Option<u64>,
    /// Evaluate every n = 1..=NMAX on one coupled tree per trial
    #[arg(long, value_name = "NMAX")]
    coupled: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct EnumerateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
}

#[derive(Args, Debug)]
struct MomentsArgs {
    #[command(flatten)]
    branching: Branching,
    #[arg(long)]
    height: usize,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Configuration file; flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    format: Option<Format>,
    /// Comma-separated alphas
    #[arg(long, value_delimiter = ',')]
    alpha_grid: Option<Vec<f64>>,
    /// Comma-separated heights
    #[arg(long, value_delimiter = ',')]
    h_grid: Option<Vec<usize>>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<SweepMode>,
    #[arg(long)]
    beta: Option<HExpr>,
    #[arg(long)]
    z: Option<f64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    levels: Option<usize>,
}

#[derive(Args, Debug)]
struct LevelsArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    height: usize,
    #[arg(long)]
    levels: usize,
    #[arg(long)]
    eps: f64,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct RegimeArgs {
    /// Offset beta_h as an expression in h, e.g. "(log h)^2/h"
    #[arg(long)]
    beta: HExpr,
    /// Floor eps_h as an expression in h (default sqrt(beta_h log h / h))
    #[arg(long)]
    eps: Option<HExpr>,
    #[arg(long)]
    h_min: usize,
    #[arg(long)]
    h_max: usize,
    #[arg(long, default_value_t = 1)]
    h_step: usize,
    #[arg(long)]
    trials: u64,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Ten times the quick budget
    #[arg(long)]
    thorough: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the report as JSON
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

/// Worker count from the flag, else `ACCPERC_WORKERS`, else the number of CPUs.
pub fn default_workers(flag: Option<usize>) -> Result<usize> {
    if let Some(w) = flag {
        return Ok(w);
    }
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::InvalidParams(format!("{WORKERS_ENV}='{v}' is not a worker count"))),
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

fn model(b: &Branching, height: usize, eps: f64) -> Result<ModelParams> {
    let params = match (b.alpha, b.n) {
        (Some(a), None) => ModelParams::from_alpha(a, height)?,
        (None, Some(n)) => ModelParams::new(n, height)?,
        _ => unreachable!("clap enforces exactly one of --alpha and --n"),
    };
    params.with_eps(eps)
}

fn estimate_lines(out: &mut dyn Write, est: &TrialEstimate) -> std::io::Result<()> {
    writeln!(out, "trials,{}", est.trials)?;
    writeln!(out, "successes,{}", est.successes)?;
    writeln!(out, "p_hat,{}", est.p_hat)?;
    writeln!(out, "ci_lo,{}", est.ci_lo)?;
    writeln!(out, "ci_hi,{}", est.ci_hi)
}

fn stats_lines(out: &mut dyn Write, prefix: &str, s: &StreamingStats) -> std::io::Result<()> {
    writeln!(out, "{prefix}_mean,{}", s.mean)?;
    writeln!(out, "{prefix}_std_error,{}", s.std_error())?;
    writeln!(out, "{prefix}_saturated,{}", s.saturated_count)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let params = model(&a.branching, a.height, a.eps)?;
    if a.trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let workers = default_workers(a.workers)?;
    writeln!(out, "# simulate {params} trials={} seed={}", a.trials, a.seed)?;
    if let Some(n_max) = a.coupled {
        let ns: Vec<usize> = (1..=n_max).collect();
        let c = run_coupled_sweep(params.h(), &ns, a.trials, a.seed, workers)?;
        writeln!(out, "# coupled trees, monotonicity violations: {}", c.violations)?;
        writeln!(out, "n,successes,p_hat,ci_lo,ci_hi")?;
        for (n, e) in c.ns.iter().zip(&c.estimates) {
            writeln!(out, "{n},{},{},{},{}", e.successes, e.p_hat, e.ci_lo, e.ci_hi)?;
        }
        return Ok(());
    }
    let pool = build_pool(workers)?;
    let restricted = a.eps > 0.0;
    let log_e = expected_paths(params.n(), params.h()).log_value;
    writeln!(out, "quantity,value")?;
    writeln!(out, "n,{}", params.n())?;
    writeln!(out, "h,{}", params.h())?;
    writeln!(out, "eps,{}", params.eps())?;
    match a.cap {
        None => {
            let mode = if restricted { TrialMode::RestrictedExists } else { TrialMode::Exists };
            let tc = TrialConfig::new(params, mode);
            let hits = pool.install(|| count_hits(a.trials, a.seed, |s| simulate_exists(&tc, s)))?;
            estimate_lines(out, &TrialEstimate::new(hits, a.trials, Z_95))?;
        }
        Some(cap) => {
            let mode = if restricted { TrialMode::RestrictedCount } else { TrialMode::Count };
            let tc = TrialConfig::new(params, mode).with_cap(cap)?;
            let (hits, stats) = pool.install(|| chunked_counts(a.trials, a.seed, |s| simulate_count_capped(&tc, s)))?;
            estimate_lines(out, &TrialEstimate::new(hits, a.trials, Z_95))?;
            stats_lines(out, "count", &stats)?;
        }
    }
    writeln!(out, "log_expected_paths,{log_e}")?;
    writeln!(out, "markov_bound,{}", log_e.exp().min(1.0))?;
    Ok(())
}

fn enumerate(a: EnumerateArgs, out: &mut dyn Write) -> Result<()> {
    let params = ModelParams::new(a.n, a.height)?.with_eps(a.eps)?;
    if a.trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let (mut paths, mut restricted) = (StreamingStats::new(), StreamingStats::new());
    let mut hits = 0;
    for t in 0..a.trials {
        let r = count_report(&sample_full_tree(&params, derive_seed(a.seed, &[t]))?, a.eps)?;
        hits += u64::from(r.exists);
        paths.update(r.n_paths as f64);
        restricted.update(r.n_restricted as f64);
    }
    let exp = expected_paths(a.n, a.height);
    writeln!(out, "# enumerate {params} trials={} seed={}", a.trials, a.seed)?;
    writeln!(out, "quantity,value")?;
    estimate_lines(out, &TrialEstimate::new(hits, a.trials, Z_95))?;
    stats_lines(out, "paths", &paths)?;
    stats_lines(out, "restricted_paths", &restricted)?;
    match exp.exact {
        Some(e) => writeln!(out, "expected_paths,{e}")?,
        None => writeln!(out, "log_expected_paths,{}", exp.log_value)?,
    }
    Ok(())
}

fn moments(a: MomentsArgs, out: &mut dyn Write) -> Result<()> {
    let params = model(&a.branching, a.height, a.eps)?;
    let report = MomentReport::compute(&params)?;
    writeln!(out, "# moments {params}")?;
    writeln!(out, "quantity,value")?;
    for (name, value) in report.entries() {
        writeln!(out, "{name},{value}")?;
    }
    Ok(())
}

fn sweep(a: SweepArgs, out: &mut dyn Write) -> Result<()> {
    let mut notes = Vec::new();
    let (mut cfg, mut file_out, mut file_format) = match &a.config {
        Some(path) => {
            let loaded = load_config(path)?;
            for key in &loaded.defaulted {
                if *key == "trials" && a.trials.is_none() {
                    notes.push(format!("trials not set; default {} applied", loaded.sweep.trials_per_point));
                }
            }
            (loaded.sweep, loaded.out, loaded.format)
        }
        None => {
            if a.trials.is_none() {
                notes.push(format!("trials not set; default {} applied", SweepConfig::default().trials_per_point));
            }
            (
                SweepConfig {
                    alpha_grid: Vec::new(),
                    h_grid: Vec::new(),
                    ..SweepConfig::default()
                },
                None,
                None,
            )
        }
    };
    if let Some(v) = a.alpha_grid {
        cfg.alpha_grid = v;
    }
    if let Some(v) = a.h_grid {
        cfg.h_grid = v;
    }
    if let Some(v) = a.eps {
        cfg.eps = v;
    }
    if let Some(v) = a.trials {
        cfg.trials_per_point = v;
    }
    if let Some(v) = a.seed {
        cfg.master_seed = v;
    }
    if let Some(v) = a.mode {
        cfg.mode = v;
    }
    if let Some(v) = a.beta {
        cfg.beta = Some(v);
    }
    if let Some(v) = a.z {
        cfg.z = v;
    }
    if let Some(v) = a.cap {
        cfg.cap = v;
    }
    if let Some(v) = a.levels {
        cfg.levels = v;
    }
    let env_workers = a.config.is_none() || a.workers.is_some();
    if env_workers || cfg.workers == 0 {
        cfg.workers = default_workers(a.workers)?;
    }
    if a.out.is_some() {
        file_out = a.out;
    }
    if a.format.is_some() {
        file_format = a.format;
    }
    let format = file_format.unwrap_or(Format::Csv);
    cfg.validate()?;

    let table = match cfg.mode {
        SweepMode::Exists | SweepMode::Count => render(&run_sweep(&cfg)?, format),
        SweepMode::Levels => {
            let mut rows: Vec<LevelRow> = Vec::new();
            for (index, alpha, h) in cfg.points() {
                let params = ModelParams::from_alpha(alpha, h)?;
                let lc = LevelConfig::new(cfg.levels, cfg.eps)?;
                let seed = derive_seed(cfg.master_seed, &[index]);
                rows.extend(run_level_experiment(&params, &lc, cfg.trials_per_point, seed, cfg.workers)?.rows);
            }
            render(&rows, format)
        }
        SweepMode::Regime => {
            let beta = cfg.beta.as_ref().expect("validated");
            let s = run_regime_sweep(&cfg.h_grid, beta, None, cfg.trials_per_point, cfg.master_seed, cfg.workers, cfg.z)?;
            notes.push(format!("verdict {} (heuristic)", s.classification.verdict.name()));
            render(&s.rows, format)
        }
    };

    writeln!(
        out,
        "# sweep mode={} points={} trials_per_point={} seed={}",
        cfg.mode.name(),
        cfg.points().len(),
        cfg.trials_per_point,
        cfg.master_seed
    )?;
    for note in &notes {
        writeln!(out, "# {note}")?;
    }
    match file_out {
        Some(path) => {
            std::fs::write(&path, table)?;
            writeln!(out, "# wrote {}", path.display())?;
        }
        None => out.write_all(table.as_bytes())?,
    }
    Ok(())
}

fn levels(a: LevelsArgs, out: &mut dyn Write) -> Result<()> {
    let params = ModelParams::new(a.n, a.height)?;
    let lc = LevelConfig::new(a.levels, a.eps)?;
    let ex = run_level_experiment(&params, &lc, a.trials, a.seed, default_workers(a.workers)?)?;
    writeln!(out, "# levels {params} J={} eps={} trials={} seed={}", a.levels, a.eps, a.trials, a.seed)?;
    writeln!(out, "# failure threshold (n eps/(2J))^J = {}", ex.failure_threshold)?;
    writeln!(out, "# failure frequency {} (ci {}, {})", ex.failure.p_hat, ex.failure.ci_lo, ex.failure.ci_hi)?;
    writeln!(out, "# chain bound {} (clamped {})", ex.chain_bound.raw, ex.chain_bound.clamped)?;
    writeln!(out, "# level-4 bound {} (clamped {})", ex.level4_bound.raw, ex.level4_bound.clamped)?;
    writeln!(out, "# {}", ex.bound_note())?;
    writeln!(out, "# nesting holds in every trial: {}", ex.nesting_holds)?;
    out.write_all(render(&ex.rows, Format::Csv).as_bytes())?;
    Ok(())
}

fn regime(a: RegimeArgs, out: &mut dyn Write) -> Result<()> {
    if a.h_min == 0 || a.h_min > a.h_max || a.h_step == 0 {
        return Err(Error::InvalidParams("need 1 <= h-min <= h-max and h-step >= 1".into()));
    }
    let grid: Vec<usize> = (a.h_min..=a.h_max).step_by(a.h_step).collect();
    let s = run_regime_sweep(&grid, &a.beta, a.eps.as_ref(), a.trials, a.seed, default_workers(a.workers)?, Z_95)?;
    writeln!(out, "# regime beta={} trials={} seed={}", a.beta, a.trials, a.seed)?;
    writeln!(
        out,
        "# verdict {} (heuristic: divergence judged on h up to {:.0e}, threshold {})",
        s.classification.verdict.name(),
        s.classification.diagnostics.last().map_or(0.0, |d| d.h),
        s.classification.threshold
    )?;
    out.write_all(render(&s.rows, Format::Csv).as_bytes())?;
    Ok(())
}

fn verify(a: VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool> {
    let budget = if a.thorough { Budget::Thorough } else { Budget::Quick };
    let opts = SuiteOptions {
        workers: default_workers(a.workers)?,
        ..SuiteOptions::new(budget, a.seed)
    };
    let report = run_verification_suite(&opts);
    writeln!(out, "# verify budget={budget:?} seed={}", a.seed)?;
    writeln!(out, "check_name,status,measured,tolerance")?;
    for (c, secs) in report.checks.iter().zip(&report.seconds) {
        let _ = writeln!(err, "{} took {secs:.2} s", c.check_name);
        let status = if c.passed() { "pass" } else { "fail" };
        writeln!(out, "{},{status},{},{}", c.check_name, c.measured, c.tolerance)?;
        writeln!(out, "# {}", c.details)?;
    }
    if let Some(path) = a.json {
        std::fs::write(&path, report.to_json())?;
    }
    writeln!(out, "# {} of {} checks passed", report.checks.len() - report.failures().len(), report.checks.len())?;
    Ok(report.all_passed())
}

/// Runs the command line `args` (including the program name) and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    let result = match cli.command {
        Command::Simulate(a) => simulate(a, out).map(|_| true),
        Command::Enumerate(a) => enumerate(a, out).map(|_| true),
        Command::Moments(a) => moments(a, out).map(|_| true),
        Command::Sweep(a) => sweep(a, out).map(|_| true),
        Command::Levels(a) => levels(a, out).map(|_| true),
        Command::Regime(a) => regime(a, out).map(|_| true),
        Command::Verify(a) => verify(a, out, err),
    };
    match result {
        Ok(true) => 0,
        Ok(false) => 3,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if e.is_guard() {
                2
            } else {
                1
            }
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

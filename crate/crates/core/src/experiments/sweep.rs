use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::io::{Field, Record};
use crate::expr::HExpr;
use crate::model::ModelParams;
use crate::moments::expected_paths;
use crate::sampler::{
    simulate_count_capped, simulate_exists, simulate_exists_coupled_at, CappedCount, TrialConfig, TrialMode, DEFAULT_CAP,
};
use crate::stats::{StreamingStats, TrialEstimate, Z_95};
use crate::stream::derive_seed;

/// Trials are grouped into fixed-size chunks so that floating-point merges
/// happen in the same order whatever the worker count.
pub(crate) const CHUNK: u64 = 1024;

pub const DEFAULT_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Exists,
    Count,
    Levels,
    Regime,
}

impl std::str::FromStr for SweepMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exists" => Ok(SweepMode::Exists),
            "count" => Ok(SweepMode::Count),
            "levels" => Ok(SweepMode::Levels),
            "regime" => Ok(SweepMode::Regime),
            other => Err(Error::InvalidParams(format!("unknown sweep mode '{other}'"))),
        }
    }
}

impl SweepMode {
    pub fn name(self) -> &'static str {
        match self {
            SweepMode::Exists => "exists",
            SweepMode::Count => "count",
            SweepMode::Levels => "levels",
            SweepMode::Regime => "regime",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub alpha_grid: Vec<f64>,
    pub h_grid: Vec<usize>,
    pub eps: f64,
    pub trials_per_point: u64,
    pub master_seed: u64,
    pub mode: SweepMode,
    pub beta: Option<HExpr>,
    pub z: f64,
    pub workers: usize,
    /// Saturation cap for count mode.
    pub cap: u64,
    /// Number of constrained levels for levels mode.
    pub levels: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            alpha_grid: vec![1.0],
            h_grid: vec![10],
            eps: 0.0,
            trials_per_point: DEFAULT_TRIALS,
            master_seed: 0,
            mode: SweepMode::Exists,
            beta: None,
            z: Z_95,
            workers: 1,
            cap: DEFAULT_CAP,
            levels: 4,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h_grid.is_empty() {
            return Err(Error::InvalidParams("h grid is empty".into()));
        }
        if self.mode != SweepMode::Regime && self.alpha_grid.is_empty() {
            return Err(Error::InvalidParams("alpha grid is empty".into()));
        }
        if !self.alpha_grid.windows(2).all(|w| w[0] <= w[1]) || !self.h_grid.windows(2).all(|w| w[0] <= w[1]) {
            return Err(Error::InvalidParams("grids must be sorted".into()));
        }
        if self.alpha_grid.iter().any(|a| !(*a > 0.0 && a.is_finite())) {
            return Err(Error::InvalidParams("alpha values must be positive".into()));
        }
        if self.h_grid.contains(&0) {
            return Err(Error::InvalidParams("heights must be positive".into()));
        }
        if self.trials_per_point == 0 {
            return Err(Error::InvalidParams("trials per point must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.eps) {
            return Err(Error::InvalidParams(format!("eps = {} is outside [0, 1)", self.eps)));
        }
        if !(self.z > 0.0) {
            return Err(Error::InvalidParams("z must be positive".into()));
        }
        if self.workers == 0 {
            return Err(Error::InvalidParams("workers must be at least 1".into()));
        }
        if self.cap == 0 {
            return Err(Error::InvalidParams("cap must be at least 1".into()));
        }
        if self.mode == SweepMode::Regime && self.beta.is_none() {
            return Err(Error::InvalidParams("regime mode needs a beta expression".into()));
        }
        Ok(())
    }

    /// `(point index, alpha, h)` in output order: heights outer, alphas inner.
    pub fn points(&self) -> Vec<(u64, f64, usize)> {
        let mut points = Vec::with_capacity(self.alpha_grid.len() * self.h_grid.len());
        for &h in &self.h_grid {
            for &alpha in &self.alpha_grid {
                points.push((points.len() as u64, alpha, h));
            }
        }
        points
    }
}

/// One grid point of an existence sweep. Infeasible points carry
/// `trials = 0` and empty statistical fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub n: u64,
    pub h: u64,
    pub eps: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: Option<f64>,
    pub ci_lo: Option<f64>,
    pub ci_hi: Option<f64>,
    pub log_expected_paths: Option<f64>,
    pub markov_bound: Option<f64>,
    pub seed: u64,
}

pub const SWEEP_HEADER: [&str; 12] = [
    "alpha",
    "n",
    "h",
    "eps",
    "trials",
    "successes",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "log_expected_paths",
    "markov_bound",
    "seed",
];

impl Record for SweepRow {
    fn header() -> &'static [&'static str] {
        &SWEEP_HEADER
    }

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Float(self.alpha),
            Field::Int(self.n),
            Field::Int(self.h),
            Field::Float(self.eps),
            Field::Int(self.trials),
            Field::Int(self.successes),
            Field::opt_prob(self.p_hat),
            Field::opt_prob(self.ci_lo),
            Field::opt_prob(self.ci_hi),
            Field::opt_float(self.log_expected_paths),
            Field::opt_prob(self.markov_bound),
            Field::Int(self.seed),
        ]
    }
}

impl SweepRow {
    pub fn is_flagged(&self) -> bool {
        self.trials == 0
    }

    pub fn estimate(&self, z: f64) -> Option<TrialEstimate> {
        (self.trials > 0).then(|| TrialEstimate::new(self.successes, self.trials, z))
    }

    /// `p_hat <= markov_bound + 4 sqrt(p_hat (1 - p_hat) / trials)`.
    pub fn respects_markov(&self) -> bool {
        match (self.p_hat, self.markov_bound) {
            (Some(p), Some(m)) => p <= m + 4.0 * (p * (1.0 - p) / self.trials as f64).sqrt(),
            _ => true,
        }
    }
}

pub(crate) fn build_pool(workers: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start {workers} workers: {e}")))
}

/// Number of trials `t < trials` for which `hit(derive_seed(seed, [t]))`.
pub(crate) fn count_hits<F>(trials: u64, seed: u64, hit: F) -> Result<u64>
where
    F: Fn(u64) -> Result<bool> + Sync,
{
    (0..trials)
        .into_par_iter()
        .map(|t| hit(derive_seed(seed, &[t])).map(u64::from))
        .try_reduce(|| 0, |a, b| Ok(a + b))
}

/// Capped counts of `trials` trials, merged chunk by chunk in trial order:
/// the number of trials with at least one path, and streaming statistics of
/// the counts with saturated trials censored.
pub(crate) fn chunked_counts<F>(trials: u64, seed: u64, count: F) -> Result<(u64, StreamingStats)>
where
    F: Fn(u64) -> Result<CappedCount> + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<(u64, StreamingStats)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (mut hits, mut s) = (0, StreamingStats::new());
            for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                let r = count(derive_seed(seed, &[t]))?;
                hits += u64::from(r.count > 0);
                if r.saturated {
                    s.record_saturated();
                } else {
                    s.update(r.count as f64);
                }
            }
            Ok((hits, s))
        })
        .collect::<Result<_>>()?;
    Ok(parts
        .iter()
        .fold((0, StreamingStats::new()), |(h, acc), (ph, s)| (h + ph, acc.merge(s))))
}

fn flagged_row(alpha: f64, h: usize, eps: f64, seed: u64) -> SweepRow {
    SweepRow {
        alpha,
        n: (alpha * h as f64).floor().max(0.0) as u64,
        h: h as u64,
        eps,
        trials: 0,
        successes: 0,
        p_hat: None,
        ci_lo: None,
        ci_hi: None,
        log_expected_paths: None,
        markov_bound: None,
        seed,
    }
}

/// Per-point count statistics from a count-mode sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Restricted path-count statistics per row (count mode only).
    pub count_stats: Vec<Option<StreamingStats>>,
}

fn run_point(cfg: &SweepConfig, index: u64, alpha: f64, h: usize) -> Result<(SweepRow, Option<StreamingStats>)> {
    let seed = derive_seed(cfg.master_seed, &[index]);
    let params = match ModelParams::from_alpha(alpha, h).and_then(|p| p.with_eps(cfg.eps)) {
        Ok(p) => p,
        Err(_) => return Ok((flagged_row(alpha, h, cfg.eps, seed), None)),
    };
    let trials = cfg.trials_per_point;
    let (successes, stats) = match cfg.mode {
        SweepMode::Exists => {
            let tc = TrialConfig::new(params, TrialMode::Exists);
            (count_hits(trials, seed, |s| simulate_exists(&tc, s))?, None)
        }
        SweepMode::Count => {
            let tc = TrialConfig::new(params, TrialMode::RestrictedCount).with_cap(cfg.cap)?;
            let (hits, stats) = chunked_counts(trials, seed, |s| simulate_count_capped(&tc, s))?;
            (hits, Some(stats))
        }
        SweepMode::Levels | SweepMode::Regime => {
            return Err(Error::InvalidParams(format!(
                "mode {} has its own runner",
                cfg.mode.name()
            )))
        }
    };
    let est = TrialEstimate::new(successes, trials, cfg.z);
    let log_e = expected_paths(params.n(), h).log_value;
    let row = SweepRow {
        alpha,
        n: params.n() as u64,
        h: h as u64,
        eps: cfg.eps,
        trials,
        successes,
        p_hat: Some(est.p_hat),
        ci_lo: Some(est.ci_lo),
        ci_hi: Some(est.ci_hi),
        log_expected_paths: Some(log_e),
        markov_bound: Some(log_e.exp().min(1.0)),
        seed,
    };
    Ok((row, stats))
}

/// Runs an existence (or restricted-count) sweep with rows and count
/// statistics.
pub fn run_sweep_detailed(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let pool = build_pool(cfg.workers)?;
    pool.install(|| {
        let mut rows = Vec::new();
        let mut count_stats = Vec::new();
        for (index, alpha, h) in cfg.points() {
            let (row, stats) = run_point(cfg, index, alpha, h)?;
            rows.push(row);
            count_stats.push(stats);
        }
        Ok(SweepOutput { rows, count_stats })
    })
}

/// One row per `(h, alpha)` grid point. Trial `t` of point `i` uses the tree
/// of seed `derive_seed(derive_seed(master_seed, [i]), [t])`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    Ok(run_sweep_detailed(cfg)?.rows)
}

/// Existence rates on coupled trees across an `n` grid at fixed height.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSweep {
    pub h: usize,
    pub ns: Vec<usize>,
    pub estimates: Vec<TrialEstimate>,
    /// Trials whose indicator sequence decreased somewhere along `ns`.
    pub violations: u64,
    pub trials: u64,
}

/// Evaluates every `n` in `ns` (sorted) on the same coupled tree per trial.
pub fn run_coupled_sweep(h: usize, ns: &[usize], trials: u64, master_seed: u64, workers: usize) -> Result<CoupledSweep> {
    if ns.is_empty() || ns.contains(&0) || !ns.windows(2).all(|w| w[0] <= w[1]) {
        return Err(Error::InvalidParams("n grid must be sorted and positive".into()));
    }
    if h == 0 || trials == 0 {
        return Err(Error::InvalidParams("need h >= 1 and trials >= 1".into()));
    }
    let pool = build_pool(workers)?;
    let seed = derive_seed(master_seed, &[h as u64]);
    let (hits, violations) = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let seq = simulate_exists_coupled_at(h, ns, derive_seed(seed, &[t]));
                let bad = u64::from(seq.windows(2).any(|w| w[0] && !w[1]));
                (seq.into_iter().map(u64::from).collect::<Vec<_>>(), bad)
            })
            .reduce(
                || (vec![0u64; ns.len()], 0u64),
                |(mut a, va), (b, vb)| {
                    a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                    (a, va + vb)
                },
            )
    });
    Ok(CoupledSweep {
        h,
        ns: ns.to_vec(),
        estimates: hits.iter().map(|&s| TrialEstimate::new(s, trials, Z_95)).collect(),
        violations,
        trials,
    })
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::io::{Field, Record};
use crate::experiments::sweep::{build_pool, count_hits};
use crate::expr::HExpr;
use crate::model::RegimeParams;
use crate::moments::{default_classification_grid, expected_paths, theorem2_classify, Classification, DEFAULT_DIVERGENCE_THRESHOLD};
use crate::sampler::{simulate_exists, TrialConfig, TrialMode};
use crate::stats::TrialEstimate;
use crate::stream::derive_seed;

/// One height of a near-critical sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegimeRow {
    pub h: u64,
    pub beta: f64,
    pub n: u64,
    pub eps_h: f64,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub log_expected_paths: f64,
    pub markov_bound: f64,
    /// `log h - 2 h beta_h`.
    pub subcritical: f64,
    /// `h beta_h / log h`.
    pub supercritical: f64,
    pub seed: u64,
}

impl Record for RegimeRow {
    fn header() -> &'static [&'static str] {
        &[
            "h",
            "beta",
            "n",
            "eps_h",
            "trials",
            "successes",
            "p_hat",
            "ci_lo",
            "ci_hi",
            "log_expected_paths",
            "markov_bound",
            "subcritical",
            "supercritical",
            "seed",
        ]
    }

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Int(self.h),
            Field::Float(self.beta),
            Field::Int(self.n),
            Field::Float(self.eps_h),
            Field::Int(self.trials),
            Field::Int(self.successes),
            Field::Prob(self.p_hat),
            Field::Prob(self.ci_lo),
            Field::Prob(self.ci_hi),
            Field::Float(self.log_expected_paths),
            Field::Prob(self.markov_bound),
            Field::Float(self.subcritical),
            Field::Float(self.supercritical),
            Field::Int(self.seed),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeSweep {
    pub rows: Vec<RegimeRow>,
    pub classification: Classification,
}

/// `sqrt(max(beta_h, 0) log h / h)`, kept below 1. It satisfies
/// `eps_h / beta_h -> 0` and `h eps_h / log h -> infinity` whenever
/// `h beta_h / log h -> infinity`.
pub fn default_eps(h: usize, beta: f64) -> f64 {
    let hf = h as f64;
    (beta.max(0.0) * hf.ln().max(0.0) / hf).sqrt().min(0.999)
}

/// Estimates existence at `n = floor(((1 + beta_h)/e) h)` for every height
/// and classifies `beta` on the default diagnostic grid.
pub fn run_regime_sweep(
    h_grid: &[usize],
    beta: &HExpr,
    eps_fn: Option<&HExpr>,
    trials: u64,
    master_seed: u64,
    workers: usize,
    z: f64,
) -> Result<RegimeSweep> {
    if h_grid.is_empty() || h_grid.contains(&0) {
        return Err(Error::InvalidParams("height grid must be non-empty and positive".into()));
    }
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let pool = build_pool(workers)?;
    let mut rows = Vec::with_capacity(h_grid.len());
    for (index, &h) in h_grid.iter().enumerate() {
        let b = beta.eval(h as f64);
        let eps = match eps_fn {
            Some(f) => f.eval(h as f64),
            None => default_eps(h, b),
        };
        let rp = RegimeParams::new(h, b, eps)?;
        if rp.n() == 0 {
            return Err(Error::Infeasible(format!("beta_h = {b} gives n = 0 at h = {h}")));
        }
        let seed = derive_seed(master_seed, &[index as u64]);
        let tc = TrialConfig::new(rp.model(), TrialMode::Exists);
        let hits = pool.install(|| count_hits(trials, seed, |s| simulate_exists(&tc, s)))?;
        let est = TrialEstimate::new(hits, trials, z);
        let log_e = expected_paths(rp.n(), h).log_value;
        let hf = h as f64;
        rows.push(RegimeRow {
            h: h as u64,
            beta: b,
            n: rp.n() as u64,
            eps_h: eps,
            trials,
            successes: hits,
            p_hat: est.p_hat,
            ci_lo: est.ci_lo,
            ci_hi: est.ci_hi,
            log_expected_paths: log_e,
            markov_bound: log_e.exp().min(1.0),
            subcritical: hf.ln() - 2.0 * hf * b,
            supercritical: hf * b / hf.ln(),
            seed,
        });
    }
    let classification = theorem2_classify(&default_classification_grid(), beta, DEFAULT_DIVERGENCE_THRESHOLD);
    Ok(RegimeSweep { rows, classification })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::Verdict;
    use crate::stats::Z_95;

    #[test]
    fn critical_line_follows_markov_decay() {
        let grid: Vec<usize> = (10..=28).step_by(6).collect();
        let s = run_regime_sweep(&grid, &HExpr::constant(0.0), None, 2000, 3, 2, Z_95).unwrap();
        assert_eq!(s.classification.verdict, Verdict::TendsToZero);
        for r in &s.rows {
            assert_eq!(r.eps_h, 0.0);
            let se = (r.p_hat * (1.0 - r.p_hat) / r.trials as f64).sqrt();
            assert!(r.p_hat <= r.markov_bound + 4.0 * se);
            // n e / h <= 1 here, so E[N] <= 1/sqrt(2 pi h)
            assert!(r.markov_bound <= 1.0 / (2.0 * std::f64::consts::PI * r.h as f64).sqrt());
        }
    }

    #[test]
    fn supercritical_offset() {
        let beta = HExpr::parse("(log h)^2/h").unwrap();
        let s = run_regime_sweep(&[12, 20], &beta, None, 500, 3, 1, Z_95).unwrap();
        assert_eq!(s.classification.verdict, Verdict::TendsToOne);
        assert!(s.rows.iter().all(|r| r.eps_h > 0.0 && r.eps_h < 1.0));
        let again = run_regime_sweep(&[12, 20], &beta, None, 500, 3, 4, Z_95).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn empty_tree_is_rejected() {
        let r = run_regime_sweep(&[2], &HExpr::constant(-0.9), None, 10, 0, 1, Z_95);
        assert!(r.is_err());
    }
}

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::io::{Field, Record};
use crate::experiments::sweep::{build_pool, CHUNK};
use crate::model::ModelParams;
use crate::moments::{level4_bound, level_chain_bound, ProbBound};
use crate::sampler::{simulate_level_counts, LevelConfig};
use crate::stats::{StreamingStats, TrialEstimate, Z_95};
use crate::stream::derive_seed;

/// Statistics of `#M_j` for one level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub j: u64,
    pub n: u64,
    pub h: u64,
    pub levels: u64,
    pub eps: f64,
    pub trials: u64,
    pub mean: f64,
    pub std_error: f64,
    pub expected: f64,
    /// `(mean - expected) / std_error`.
    pub z_score: f64,
}

impl Record for LevelRow {
    fn header() -> &'static [&'static str] {
        &["j", "n", "h", "levels", "eps", "trials", "mean", "std_error", "expected", "z_score"]
    }

    fn fields(&self) -> Vec<Field> {
        vec![
            Field::Int(self.j),
            Field::Int(self.n),
            Field::Int(self.h),
            Field::Int(self.levels),
            Field::Float(self.eps),
            Field::Int(self.trials),
            Field::Prob(self.mean),
            Field::Prob(self.std_error),
            Field::Float(self.expected),
            Field::Prob(self.z_score),
        ]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelExperiment {
    pub rows: Vec<LevelRow>,
    /// `(n eps / (2J))^J`: the last level fails when `#M_J` is at most this.
    pub failure_threshold: f64,
    /// Trials with `#M_J <= failure_threshold`.
    pub failure: TrialEstimate,
    /// Per-level Chernoff union bound on the failure probability.
    pub chain_bound: ProbBound,
    /// The closed-form `4 exp(-n eps^4 / 16384)` bound (meaningful for `J = 4`).
    pub level4_bound: ProbBound,
    /// Every trial satisfied `#M_j <= n #M_{j-1}` and `#M_j <= n^j`.
    pub nesting_holds: bool,
}

impl LevelExperiment {
    /// The bound that applies to this run: the closed form for four levels,
    /// otherwise the per-level chain.
    pub fn applicable_bound(&self) -> ProbBound {
        if self.rows.len() == 4 {
            self.level4_bound
        } else {
            self.chain_bound
        }
    }

    pub fn bound_dominates(&self) -> bool {
        self.failure.p_hat <= self.applicable_bound().clamped
    }

    /// Plain-language note on whether the bound carries information.
    pub fn bound_note(&self) -> String {
        let b = self.applicable_bound();
        if b.is_vacuous() {
            format!(
                "bound {:.6e} clamps to 1: domination of the failure frequency {} is vacuously satisfied",
                b.raw, self.failure.p_hat
            )
        } else {
            format!("bound {:.6e} vs failure frequency {}", b.raw, self.failure.p_hat)
        }
    }
}

fn nested(counts: &[u64], n: u64) -> bool {
    let mut prev = 1u64;
    let mut pow = 1u128;
    counts.iter().all(|&c| {
        pow = pow.saturating_mul(n as u128);
        let ok = c <= prev.saturating_mul(n) && (c as u128) <= pow;
        prev = c;
        ok
    })
}

/// Runs `trials` level-count trials; trial `t` uses `derive_seed(seed, [t])`.
pub fn run_level_experiment(
    params: &ModelParams,
    lc: &LevelConfig,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<LevelExperiment> {
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    if lc.levels > params.h() {
        return Err(Error::InvalidParams(format!(
            "{} levels exceed height {}",
            lc.levels,
            params.h()
        )));
    }
    let j_max = lc.levels;
    let n = params.n();
    let threshold = (n as f64 * lc.width_eps / (2.0 * j_max as f64)).powi(j_max as i32);

    struct Acc {
        stats: Vec<StreamingStats>,
        failures: u64,
        nested: bool,
    }

    let pool = build_pool(workers)?;
    let chunks = trials.div_ceil(CHUNK);
    let parts: Vec<Acc> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut acc = Acc {
                    stats: vec![StreamingStats::new(); j_max],
                    failures: 0,
                    nested: true,
                };
                for t in c * CHUNK..((c + 1) * CHUNK).min(trials) {
                    let counts = simulate_level_counts(params, lc, derive_seed(seed, &[t]))?.counts;
                    for (s, &v) in acc.stats.iter_mut().zip(&counts) {
                        s.update(v as f64);
                    }
                    if (counts[j_max - 1] as f64) <= threshold {
                        acc.failures += 1;
                    }
                    acc.nested &= nested(&counts, n as u64);
                }
                Ok(acc)
            })
            .collect::<Result<_>>()
    })?;

    let mut stats = vec![StreamingStats::new(); j_max];
    let mut failures = 0;
    let mut nesting_holds = true;
    for p in &parts {
        for (total, s) in stats.iter_mut().zip(&p.stats) {
            *total = total.merge(s);
        }
        failures += p.failures;
        nesting_holds &= p.nested;
    }

    let step = lc.width_eps / j_max as f64;
    let rows = stats
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let j = i + 1;
            let expected = (n as f64 * step).powi(j as i32);
            let se = s.std_error();
            LevelRow {
                j: j as u64,
                n: n as u64,
                h: params.h() as u64,
                levels: j_max as u64,
                eps: lc.width_eps,
                trials,
                mean: s.mean,
                std_error: se,
                expected,
                z_score: if se > 0.0 { (s.mean - expected) / se } else { 0.0 },
            }
        })
        .collect();

    Ok(LevelExperiment {
        rows,
        failure_threshold: threshold,
        failure: TrialEstimate::new(failures, trials, Z_95),
        chain_bound: level_chain_bound(n, lc.width_eps, j_max),
        level4_bound: level4_bound(n, lc.width_eps),
        nesting_holds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_matches_expectations() {
        let p = ModelParams::new(20, 6).unwrap();
        let lc = LevelConfig::new(3, 0.6).unwrap();
        let ex = run_level_experiment(&p, &lc, 3000, 1, 2).unwrap();
        assert!(ex.nesting_holds);
        assert_eq!(ex.rows.len(), 3);
        for r in &ex.rows {
            assert!(r.z_score.abs() < 4.0, "level {} z = {}", r.j, r.z_score);
        }
        assert!(ex.bound_dominates());
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let p = ModelParams::new(10, 5).unwrap();
        let lc = LevelConfig::new(4, 0.5).unwrap();
        let a = run_level_experiment(&p, &lc, 2500, 9, 1).unwrap();
        let b = run_level_experiment(&p, &lc, 2500, 9, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn nesting_check() {
        assert!(nested(&[3, 9, 27], 3));
        assert!(!nested(&[3, 10], 3));
        assert!(!nested(&[4], 3));
    }
}

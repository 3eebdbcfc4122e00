//! The verification suite: every identity, oracle agreement and inequality
//! the crate relies on, run as one structured report.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::io::to_csv;
use crate::experiments::levels::run_level_experiment;
use crate::experiments::sweep::{run_coupled_sweep, run_sweep, SweepConfig, SweepMode};
use crate::expr::HExpr;
use crate::model::{in_increasing, in_ramp_region, ModelParams, PathAddress};
use crate::moments::{
    chernoff_bound, default_classification_grid, expected_paths, fork_sum_and_tanh_bound, prop2_fork_term,
    stirling_ratio, theorem2_classify, verify_lemma_recursion, Verdict, DEFAULT_DIVERGENCE_THRESHOLD,
};
use crate::oracle::{
    binomial_cdf, count_pairs_with_fork, count_report, count_report_by, enumerate_joint_fork_prob,
    estimate_exist_prob_bruteforce, exact_joint_fork_prob, numeric_floor_ordering_prob, path_count_stats,
    sample_full_tree, LabelledTree,
};
use crate::quadrature::chain_integral;
use crate::sampler::{estimate_exists, simulate_count_capped, LevelConfig, TrialConfig, TrialMode};
use crate::stats::{wilson_interval, StreamingStats};
use crate::stream::derive_seed;

const PHASE_FIXTURE: &str = include_str!("../../tests/fixtures/phase_margin.txt");

/// Alphas of the height-24 phase map.
pub const PHASE_ALPHAS: [f64; 6] = [0.25, 1.0 / std::f64::consts::E, 0.5, 0.75, 1.0, 1.2];
pub const PHASE_HEIGHT: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Budget {
    Quick,
    Thorough,
}

impl Budget {
    fn scale(self) -> u64 {
        match self {
            Budget::Quick => 1,
            Budget::Thorough => 10,
        }
    }
}

/// A deliberately broken component, for checking that the suite notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fault {
    /// Accepts ties as increasing.
    NonStrictIncreasing,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub budget: Budget,
    pub seed: u64,
    pub workers: usize,
    pub fault: Option<Fault>,
}

impl SuiteOptions {
    pub fn new(budget: Budget, seed: u64) -> Self {
        SuiteOptions {
            budget,
            seed,
            workers: 1,
            fault: None,
        }
    }

    fn increasing(&self) -> fn(&[f64]) -> bool {
        match self.fault {
            None => in_increasing,
            Some(Fault::NonStrictIncreasing) => |x: &[f64]| x.windows(2).all(|w| w[0] <= w[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_name: String,
    pub status: Status,
    pub measured: f64,
    pub tolerance: f64,
    pub details: String,
}

impl CheckResult {
    fn new(name: &str, pass: bool, measured: f64, tolerance: f64, details: String) -> Self {
        CheckResult {
            check_name: name.to_string(),
            status: if pass { Status::Pass } else { Status::Fail },
            measured,
            tolerance,
            details,
        }
    }

    fn errored(name: &str, err: crate::Error) -> Self {
        CheckResult::new(name, false, f64::NAN, f64::NAN, format!("error: {err}"))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub budget: Budget,
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    /// Wall-clock seconds per check, in the same order.
    #[serde(skip)]
    pub seconds: Vec<f64>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failures(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed()).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    /// The checks as a JSON array of `{check_name, status, measured, tolerance, details}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.checks).expect("report serializes")
    }
}

/// `margin` recorded in the phase-map fixture.
pub fn phase_margin() -> f64 {
    PHASE_FIXTURE
        .lines()
        .filter_map(|l| l.split_once('='))
        .find(|(k, _)| k.trim() == "margin")
        .and_then(|(_, v)| v.trim().parse().ok())
        .expect("fixture defines margin")
}

/// Count of increasing `D_eps` paths by a direct strict depth-first search.
pub fn reference_count(tree: &LabelledTree, eps: f64) -> u64 {
    fn go(tree: &LabelledTree, eps: f64, at: PathAddress, prev: f64, labels: &mut Vec<f64>) -> u64 {
        let (n, h) = (tree.params().n(), tree.params().h());
        if at.depth() == h {
            return u64::from(in_ramp_region(labels, eps, h));
        }
        let mut total = 0;
        for i in 0..n as u32 {
            let child = at.child(i);
            let x = tree.label(&child).expect("address inside tree");
            if labels.is_empty() || x > prev {
                labels.push(x);
                total += go(tree, eps, child, x, labels);
                labels.pop();
            }
        }
        total
    }
    go(tree, eps, PathAddress::root(), 0.0, &mut Vec::new())
}

/// The tree of `seed` with every label rounded down to a multiple of 1/4,
/// so ties are common.
pub fn quantized_tree(params: &ModelParams, seed: u64) -> Result<LabelledTree> {
    let tree = sample_full_tree(params, seed)?;
    let labels = tree.labels().iter().map(|x| (x * 4.0).floor() / 4.0).collect();
    LabelledTree::from_labels(*params, labels)
}

fn fork_partition(opts: &SuiteOptions, trees: u64) -> Result<CheckResult> {
    let pred = opts.increasing();
    let mut checked = 0u64;
    let mut bad = Vec::new();
    for (n, h) in [(2, 4), (3, 3)] {
        for eps in [0.0, 0.3] {
            let params = ModelParams::new(n, h)?;
            for t in 0..trees {
                let seed = derive_seed(opts.seed, &[1, n as u64, h as u64, t]);
                for tree in [sample_full_tree(&params, seed)?, quantized_tree(&params, seed)?] {
                    let r = count_report_by(&tree, eps, pred)?;
                    let reference = reference_count(&tree, eps);
                    let ok = r.fork.total() == reference * reference && r.fork.counts[h] == reference;
                    if !ok && bad.len() < 3 {
                        bad.push(format!("(n={n}, h={h}, eps={eps}, tree {t}): N_eps={reference}, spectrum {:?}", r.fork.counts));
                    }
                    checked += 1;
                }
            }
        }
    }
    let details = if bad.is_empty() {
        format!("sum_k counts[k] = N_eps^2 and counts[h] = N_eps on {checked} trees (half with tied labels)")
    } else {
        format!("violations: {}", bad.join("; "))
    };
    Ok(CheckResult::new("fork_partition_identity", bad.is_empty(), checked as f64, 0.0, details))
}

fn strict_examples(opts: &SuiteOptions) -> Result<CheckResult> {
    let pred = opts.increasing();
    let params = ModelParams::new(2, 3)?;
    let constant = LabelledTree::from_labels(params, vec![0.5; 14])?;
    let n_const = count_report_by(&constant, 0.0, pred)?.n_paths;
    let tie = pred(&[0.2, 0.2]);
    let rise = pred(&[0.1, 0.5, 0.9]);
    let ok = n_const == 0 && !tie && rise;
    Ok(CheckResult::new(
        "strict_increase_examples",
        ok,
        n_const as f64,
        0.0,
        format!("constant tree N = {n_const}; (0.2, 0.2) increasing = {tie}; (0.1, 0.5, 0.9) increasing = {rise}"),
    ))
}

fn sampler_oracle(opts: &SuiteOptions, trees: u64) -> Result<CheckResult> {
    let mut mismatches = 0u64;
    let mut compared = 0u64;
    for (n, h, eps) in [(2, 5, 0.0), (3, 4, 0.2), (5, 4, 0.0), (4, 5, 0.2)] {
        let params = ModelParams::new(n, h)?.with_eps(eps)?;
        let plain = TrialConfig::new(params, TrialMode::Count).with_cap(u64::MAX)?;
        let restricted = TrialConfig::new(params, TrialMode::RestrictedCount).with_cap(u64::MAX)?;
        for t in 0..trees {
            let seed = derive_seed(opts.seed, &[2, n as u64, h as u64, t]);
            let r = count_report(&sample_full_tree(&params, seed)?, eps)?;
            let a = simulate_count_capped(&plain, seed)?.count;
            let b = simulate_count_capped(&restricted, seed)?.count;
            mismatches += u64::from(a != r.n_paths || b != r.n_restricted);
            compared += 1;
        }
    }
    Ok(CheckResult::new(
        "sampler_matches_oracle",
        mismatches == 0,
        mismatches as f64,
        0.0,
        format!("{compared} trees counted by both the lazy sampler and full enumeration"),
    ))
}

fn existence_agreement(opts: &SuiteOptions, trials: u64) -> Result<CheckResult> {
    let params = ModelParams::new(3, 6)?;
    let seed = derive_seed(opts.seed, &[3]);
    let brute = estimate_exist_prob_bruteforce(&params, trials, seed)?;
    let lazy = estimate_exists(&TrialConfig::new(params, TrialMode::Exists), trials, seed)?;
    Ok(CheckResult::new(
        "existence_matches_bruteforce",
        brute.successes == lazy.successes,
        (brute.successes as f64 - lazy.successes as f64).abs(),
        0.0,
        format!("n=3, h=6: {} of {trials} trees by enumeration, {} lazily", brute.successes, lazy.successes),
    ))
}

fn first_moment(opts: &SuiteOptions, trees: u64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for (n, h) in [(2, 3), (3, 3), (3, 4)] {
        let params = ModelParams::new(n, h)?;
        let stats = path_count_stats(&params, trees, derive_seed(opts.seed, &[4, n as u64, h as u64]))?;
        let exact = expected_paths(n, h).exact.expect("small instance").to_f64().expect("finite");
        let z = (stats.mean - exact).abs() / stats.std_error();
        worst = worst.max(z);
        parts.push(format!("(n={n}, h={h}) mean {:.5} vs {:.5}", stats.mean, exact));
    }
    Ok(CheckResult::new(
        "first_moment_monte_carlo",
        worst <= 4.0,
        worst,
        4.0,
        format!("{trees} trees each, measured = max |z|: {}", parts.join(", ")),
    ))
}

fn lemma_monte_carlo(opts: &SuiteOptions, samples: u64) -> Result<CheckResult> {
    let mut worst: f64 = 0.0;
    for j in 1..=6usize {
        let est = numeric_floor_ordering_prob(j, samples, derive_seed(opts.seed, &[5, j as u64]))?;
        let p = 1.0 / (1..=j + 1).map(|i| i as f64).product::<f64>();
        let se = (p * (1.0 - p) / samples as f64).sqrt();
        worst = worst.max((est.p_hat - p).abs() / se);
    }
    Ok(CheckResult::new(
        "lemma_monte_carlo",
        worst <= 4.0,
        worst,
        4.0,
        format!("floored ordering frequency vs 1/(j+1)! for j = 1..6 at {samples} samples; measured = max |z|"),
    ))
}

fn lemma_quadrature() -> Result<CheckResult> {
    let tol = 1e-8;
    let mut worst = (chain_integral(&[0.5], &|_| 1.0, 1.0, 1e-12)? - 0.5).abs();
    for j in 2..=5 {
        worst = worst.max(verify_lemma_recursion(j, tol)?);
    }
    Ok(CheckResult::new(
        "lemma_quadrature",
        worst <= tol,
        worst,
        tol,
        "nested quadrature of the floored ordering probability and its recursion integrals, j = 1..5".into(),
    ))
}

fn stirling() -> CheckResult {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for n in 1..=10_000u64 {
        let r = stirling_ratio(n);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    CheckResult::new(
        "stirling_bracket",
        lo > 2.0 && hi < 3.0,
        hi,
        3.0,
        format!("n!/(sqrt(n) (n/e)^n) ranges over [{lo:.6}, {hi:.6}] for n = 1..10^4"),
    )
}

/// Every `(n, h, k)` with `2h - k <= 12`, `1 <= k <= h - 1` and `e n / h > 1`
/// (with `n <= n_max`).
pub fn fork_domination_cases(n_max: usize) -> Vec<(usize, usize, usize)> {
    let mut cases = Vec::new();
    for h in 2..=11usize {
        for k in 1..h {
            if 2 * h - k > 12 {
                continue;
            }
            for n in 1..=n_max {
                if n as f64 / h as f64 * std::f64::consts::E > 1.0 {
                    cases.push((n, h, k));
                }
            }
        }
    }
    cases
}

fn fork_domination(n_max: usize) -> Result<CheckResult> {
    let mut worst = f64::NEG_INFINITY;
    let mut at = (0, 0, 0);
    let cases = fork_domination_cases(n_max);
    for &(n, h, k) in &cases {
        let pairs = BigRational::from_integer(BigInt::from(count_pairs_with_fork(n, h, k)?));
        let exact = pairs * exact_joint_fork_prob(h, k)?;
        let log_ratio = ln_rational(&exact) - prop2_fork_term(n as f64 / h as f64, 0.0, h, k)?;
        if log_ratio > worst {
            worst = log_ratio;
            at = (n, h, k);
        }
    }
    Ok(CheckResult::new(
        "fork_term_domination",
        worst <= 0.0,
        worst.exp(),
        1.0,
        format!(
            "{} cases with n <= {n_max}; measured = max exact/bound ratio, at (n, h, k) = {at:?}",
            cases.len()
        ),
    ))
}

fn ln_rational(x: &BigRational) -> f64 {
    big_ln(x.numer()) - big_ln(x.denom())
}

fn big_ln(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits < 1000 {
        return x.to_f64().expect("fits").ln();
    }
    let shift = bits - 64;
    (x >> shift).to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

fn chernoff() -> CheckResult {
    let mut worst: f64 = 0.0;
    for r in [10u64, 100, 1000] {
        for p in [0.1, 0.3, 0.5, 0.9] {
            let mean = r as f64 * p;
            let tail = binomial_cdf(r, p, (mean / 2.0).floor() as u64);
            worst = worst.max(tail / chernoff_bound(mean));
        }
    }
    CheckResult::new(
        "chernoff_domination",
        worst <= 1.0,
        worst,
        1.0,
        "P(Bin(r, p) <= floor(rp/2)) / exp(-rp/8) over r in {10, 100, 1000}, p in {0.1, 0.3, 0.5, 0.9}; measured = max ratio".into(),
    )
}

fn level_counts(opts: &SuiteOptions, trials: u64) -> Result<Vec<CheckResult>> {
    let params = ModelParams::new(100, 4)?;
    let lc = LevelConfig::new(4, 0.5)?;
    let ex = run_level_experiment(&params, &lc, trials, derive_seed(opts.seed, &[7]), opts.workers)?;
    let worst = ex.rows.iter().map(|r| r.z_score.abs()).fold(0.0, f64::max);
    let means: Vec<String> = ex.rows.iter().map(|r| format!("j={}: {:.4} vs {:.4}", r.j, r.mean, r.expected)).collect();
    let bound = ex.applicable_bound();
    Ok(vec![
        CheckResult::new(
            "level_count_means",
            worst <= 4.0 && ex.nesting_holds,
            worst,
            4.0,
            format!("n=100, J=4, eps=0.5, {trials} trials; measured = max |z|; {}", means.join(", ")),
        ),
        CheckResult::new(
            "level4_bound_domination",
            ex.bound_dominates(),
            ex.failure.p_hat,
            bound.clamped,
            ex.bound_note(),
        ),
    ])
}

fn tanh_bound() -> Result<CheckResult> {
    let mut worst = f64::NEG_INFINITY;
    for h in [3usize, 10, 100, 1000, 10_000] {
        let (sum, bound) = fork_sum_and_tanh_bound(h)?;
        worst = worst.max(sum / bound);
    }
    Ok(CheckResult::new(
        "tanh_sum_bound",
        worst < 1.0,
        worst,
        1.0,
        "sum_k 1/((k-1)^(1/2) (h-k+1)) / ((2/sqrt h) atanh(sqrt((h-1)/h))) for h in {3, 10, 100, 1000, 10^4}; measured = max ratio".into(),
    ))
}

fn phase_map(opts: &SuiteOptions, trials: u64) -> Result<Vec<CheckResult>> {
    let ns: Vec<usize> = PHASE_ALPHAS.iter().map(|&a| ModelParams::from_alpha(a, PHASE_HEIGHT).map(|p| p.n())).collect::<Result<_>>()?;
    let coupled = run_coupled_sweep(PHASE_HEIGHT, &ns, trials, derive_seed(opts.seed, &[9]), opts.workers)?;
    let cfg = SweepConfig {
        alpha_grid: vec![0.25, 1.2],
        h_grid: vec![PHASE_HEIGHT],
        trials_per_point: trials,
        master_seed: derive_seed(opts.seed, &[10]),
        workers: opts.workers,
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg)?;
    let (low, high) = (&rows[0], &rows[1]);
    let (p_low, p_high) = (low.p_hat.unwrap_or(f64::NAN), high.p_hat.unwrap_or(f64::NAN));
    let markov = low.markov_bound.unwrap_or(f64::NAN);
    let se = (p_low * (1.0 - p_low) / trials as f64).sqrt();
    let margin = phase_margin();
    Ok(vec![
        CheckResult::new(
            "coupled_monotonicity",
            coupled.violations == 0,
            coupled.violations as f64,
            0.0,
            format!("h=24, n in {ns:?}, {trials} coupled trials"),
        ),
        CheckResult::new(
            "markov_consistency",
            low.respects_markov(),
            p_low,
            markov + 4.0 * se,
            format!("alpha=0.25, h=24: p_hat {p_low} vs Markov bound {markov:.4e} + 4 SE"),
        ),
        CheckResult::new(
            "phase_transition_margin",
            p_high - p_low > margin,
            p_high - p_low,
            margin,
            format!("p_hat(alpha=1.2) = {p_high}, p_hat(alpha=0.25) = {p_low}; calibrated margin {margin}"),
        ),
    ])
}

fn classifier() -> CheckResult {
    let grid = default_classification_grid();
    let cases = [
        ("0", Verdict::TendsToZero),
        ("(log h)^2/h", Verdict::TendsToOne),
        ("(log h)/(2*h)", Verdict::Indeterminate),
    ];
    let mut wrong = Vec::new();
    for (src, want) in cases {
        let beta = HExpr::parse(src).expect("valid expression");
        let got = theorem2_classify(&grid, &beta, DEFAULT_DIVERGENCE_THRESHOLD).verdict;
        if got != want {
            wrong.push(format!("{src}: {} instead of {}", got.name(), want.name()));
        }
    }
    CheckResult::new(
        "regime_classifier",
        wrong.is_empty(),
        wrong.len() as f64,
        0.0,
        if wrong.is_empty() {
            "beta = 0, (log h)^2/h, (log h)/(2h) classified as tends_to_zero, tends_to_one, indeterminate".into()
        } else {
            wrong.join("; ")
        },
    )
}

fn worker_determinism(opts: &SuiteOptions, trials: u64) -> Result<CheckResult> {
    let base = SweepConfig {
        alpha_grid: vec![0.25, 0.5, 1.0],
        h_grid: vec![8, 12],
        eps: 0.1,
        trials_per_point: trials,
        master_seed: derive_seed(opts.seed, &[11]),
        cap: 2000,
        ..SweepConfig::default()
    };
    let mut outputs = Vec::new();
    for mode in [SweepMode::Exists, SweepMode::Count] {
        for workers in [1, 2, 4] {
            let cfg = SweepConfig { mode, workers, ..base.clone() };
            outputs.push((mode, to_csv(&run_sweep(&cfg)?)));
        }
    }
    let differing = outputs
        .iter()
        .filter(|(m, o)| outputs.iter().any(|(m2, o2)| m == m2 && o != o2))
        .count();
    Ok(CheckResult::new(
        "worker_count_determinism",
        differing == 0,
        differing as f64,
        0.0,
        "exists and count sweeps with 1, 2 and 4 workers produce byte-identical CSV".into(),
    ))
}

fn statistics(opts: &SuiteOptions) -> CheckResult {
    let (lo, hi) = wilson_interval(50, 100, 1.96);
    let (lo0, hi0) = wilson_interval(0, 20, 1.96);
    let wilson_ok = (lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4 && lo0 == 0.0 && hi0 < 0.2;
    let xs: Vec<f64> = (0..10_000u64).map(|i| crate::stream::label_at(opts.seed, &[i as u32]) * 3.0).collect();
    let sequential: StreamingStats = xs.iter().copied().collect();
    let merged = xs
        .chunks(777)
        .map(|c| c.iter().copied().collect::<StreamingStats>())
        .fold(StreamingStats::new(), |a, b| a.merge(&b));
    let diff = (sequential.mean - merged.mean).abs().max((sequential.variance() - merged.variance()).abs());
    CheckResult::new(
        "statistics_merge_and_wilson",
        wilson_ok && diff <= 1e-10,
        diff,
        1e-10,
        format!("Wilson(50, 100) = ({lo:.4}, {hi:.4}); chunked vs sequential mean/variance differ by {diff:.2e}"),
    )
}

fn fork_enumeration() -> Result<CheckResult> {
    let mut compared = 0;
    let mut bad = 0;
    for h in 1..=5usize {
        for k in 0..=h {
            if 2 * h - k > 10 {
                continue;
            }
            compared += 1;
            bad += usize::from(enumerate_joint_fork_prob(h, k)? != exact_joint_fork_prob(h, k)?);
        }
    }
    Ok(CheckResult::new(
        "joint_fork_enumeration",
        bad == 0,
        bad as f64,
        0.0,
        format!("permutation enumeration equals the counting formula for {compared} (h, k) pairs"),
    ))
}

fn timed<F>(name: &str, report: &mut VerificationReport, f: F)
where
    F: FnOnce() -> Result<Vec<CheckResult>>,
{
    let start = Instant::now();
    let results = f().unwrap_or_else(|e| vec![CheckResult::errored(name, e)]);
    let secs = start.elapsed().as_secs_f64() / results.len() as f64;
    for r in results {
        report.checks.push(r);
        report.seconds.push(secs);
    }
}

/// Runs every check. Failures become report entries; nothing panics or
/// returns early.
pub fn run_verification_suite(opts: &SuiteOptions) -> VerificationReport {
    let s = opts.budget.scale();
    let mut report = VerificationReport {
        budget: opts.budget,
        seed: opts.seed,
        checks: Vec::new(),
        seconds: Vec::new(),
    };
    timed("fork_partition_identity", &mut report, || Ok(vec![fork_partition(opts, 1000 * s)?]));
    timed("strict_increase_examples", &mut report, || Ok(vec![strict_examples(opts)?]));
    timed("sampler_matches_oracle", &mut report, || Ok(vec![sampler_oracle(opts, 200 * s)?]));
    timed("existence_matches_bruteforce", &mut report, || Ok(vec![existence_agreement(opts, 2000 * s)?]));
    timed("first_moment_monte_carlo", &mut report, || Ok(vec![first_moment(opts, 100_000 * s)?]));
    timed("lemma_monte_carlo", &mut report, || Ok(vec![lemma_monte_carlo(opts, 1_000_000 * s)?]));
    timed("lemma_quadrature", &mut report, || Ok(vec![lemma_quadrature()?]));
    timed("stirling_bracket", &mut report, || Ok(vec![stirling()]));
    timed("fork_term_domination", &mut report, || Ok(vec![fork_domination(if s > 1 { 2000 } else { 200 })?]));
    timed("joint_fork_enumeration", &mut report, || Ok(vec![fork_enumeration()?]));
    timed("chernoff_domination", &mut report, || Ok(vec![chernoff()]));
    timed("level_count_means", &mut report, || level_counts(opts, 10_000 * s));
    timed("tanh_sum_bound", &mut report, || Ok(vec![tanh_bound()?]));
    timed("phase_map", &mut report, || phase_map(opts, 10_000 * s));
    timed("regime_classifier", &mut report, || Ok(vec![classifier()]));
    timed("worker_count_determinism", &mut report, || Ok(vec![worker_determinism(opts, 500 * s)?]));
    timed("statistics_merge_and_wilson", &mut report, || Ok(vec![statistics(opts)]));
    report
}

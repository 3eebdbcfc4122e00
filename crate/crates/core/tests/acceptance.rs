//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines always reach the terminal.

use std::f64::consts::E;
use std::time::{Duration, Instant};

use accperc::experiments::verify::phase_margin;
use accperc::experiments::{
    render, run_coupled_sweep, run_level_experiment, run_sweep, Format, SweepConfig, SweepMode,
};
use accperc::expr::HExpr;
use accperc::model::PathAddress;
use accperc::moments::{
    chernoff_bound, default_classification_grid, fork_sum_and_tanh_bound, lemma_integrals, prop2_fork_term,
    stirling_ratio, theorem2_classify, Verdict, DEFAULT_DIVERGENCE_THRESHOLD,
};
use accperc::oracle::{
    binomial_cdf, count_pairs_with_fork, count_report, exact_joint_fork_prob, numeric_floor_ordering_prob,
    sample_full_tree, LabelledTree,
};
use accperc::quadrature::chain_integral;
use accperc::sampler::{count_stats, LevelConfig, TrialConfig, TrialMode};
use accperc::stream::derive_seed;
use accperc::ModelParams;
use num_traits::ToPrimitive;

const SEED: u64 = 0x5EED_ACCE;

type Criterion = (&'static str, fn() -> Outcome, Duration);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn factorial(k: u64) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn binomial(n: u64, k: u64) -> f64 {
    (0..k).map(|i| (n - i) as f64 / (i + 1) as f64).product()
}

/// Increasing paths inside the ramp region, as child-index sequences.
fn ramp_paths(tree: &LabelledTree, eps: f64) -> Vec<Vec<u32>> {
    fn go(tree: &LabelledTree, eps: f64, at: PathAddress, labels: &mut Vec<f64>, out: &mut Vec<Vec<u32>>) {
        let (n, h) = (tree.params().n(), tree.params().h());
        if at.depth() == h {
            let ramp = labels
                .iter()
                .enumerate()
                .all(|(j, &x)| x >= eps + (1.0 - eps) * j as f64 / h as f64);
            if ramp {
                out.push(at.children().to_vec());
            }
            return;
        }
        for i in 0..n as u32 {
            let child = at.child(i);
            let x = tree.label(&child).unwrap();
            if labels.last().is_none_or(|&p| x > p) {
                labels.push(x);
                go(tree, eps, child, labels, out);
                labels.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(tree, eps, PathAddress::root(), &mut Vec::new(), &mut out);
    out
}

fn fork_partition() -> Outcome {
    let mut checked = 0;
    for (n, h) in [(2, 4), (3, 3)] {
        let params = ModelParams::new(n, h).unwrap();
        for eps in [0.0, 0.3] {
            for t in 0..1000 {
                let tree = sample_full_tree(&params, derive_seed(SEED, &[1, n as u64, t])).unwrap();
                let report = count_report(&tree, eps).unwrap();
                let paths = ramp_paths(&tree, eps);
                let mut spectrum = vec![0u64; h + 1];
                for u in &paths {
                    for v in &paths {
                        spectrum[u.iter().zip(v).take_while(|(a, b)| a == b).count()] += 1;
                    }
                }
                let n_eps = paths.len() as u64;
                let ok = report.n_restricted == n_eps
                    && report.fork.counts == spectrum
                    && report.fork.total() == n_eps * n_eps
                    && report.fork.counts[h] == n_eps;
                if !ok {
                    return outcome(false, format!("(n={n}, h={h}, eps={eps}) tree {t}: {:?} vs {spectrum:?}", report.fork.counts));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} trees, identity exact on each"))
}

fn first_moment() -> Outcome {
    let mut worst: f64 = 0.0;
    for (n, h) in [(2usize, 3usize), (3, 3), (3, 4)] {
        let cfg = TrialConfig::new(ModelParams::new(n, h).unwrap(), TrialMode::Count)
            .with_cap(u64::MAX)
            .unwrap();
        let s = count_stats(&cfg, 100_000, derive_seed(SEED, &[2, n as u64, h as u64])).unwrap();
        let exact = (n as f64).powi(h as i32) / factorial(h as u64);
        worst = worst.max((s.mean - exact).abs() / s.std_error());
    }
    outcome(worst <= 4.0, format!("max |z| = {worst:.3} over 10^5 trees per (n, h)"))
}

fn floor_lemma() -> Outcome {
    let mut worst_z: f64 = 0.0;
    for j in 1..=6usize {
        let p = 1.0 / factorial(j as u64 + 1);
        let est = numeric_floor_ordering_prob(j, 1_000_000, derive_seed(SEED, &[3, j as u64])).unwrap();
        worst_z = worst_z.max((est.p_hat - p).abs() / (p * (1.0 - p) / 1e6).sqrt());
    }
    let mut worst_q: f64 = 0.0;
    for j in 1..=5usize {
        let lowers: Vec<f64> = (1..=j).map(|i| i as f64 / (j + 1) as f64).collect();
        let q = chain_integral(&lowers, &|_| 1.0, 1.0, 1e-10).unwrap();
        worst_q = worst_q.max((q - 1.0 / factorial(j as u64 + 1)).abs());
        if j >= 2 {
            worst_q = worst_q.max((lemma_integrals(j, 1e-10).unwrap().p - q).abs());
        }
    }
    outcome(
        worst_z <= 4.0 && worst_q <= 1e-8,
        format!("max |z| = {worst_z:.3} (j = 1..6), max quadrature error {worst_q:.2e} (j = 1..5)"),
    )
}

fn stirling() -> Outcome {
    let bad = (1..=10_000u64).find(|&n| {
        let r = stirling_ratio(n);
        !(r > 2.0 && r < 3.0)
    });
    let (first, last) = (stirling_ratio(1), stirling_ratio(10_000));
    outcome(bad.is_none(), format!("ratio {first:.6} at n = 1, {last:.6} at n = 10^4, violation at {bad:?}"))
}

/// Probability that two chains sharing their first `k` of `h` labels both
/// increase: the shared labels are the `k` smallest, then the tails interleave.
fn joint_prob(h: usize, k: usize) -> f64 {
    let m = (h - k) as u64;
    binomial(2 * m, m) / factorial((2 * h - k) as u64)
}

fn fork_domination() -> Outcome {
    let (mut cases, mut worst, mut at) = (0, f64::NEG_INFINITY, String::new());
    for h in 2..=11usize {
        for k in (1..h).filter(|k| 2 * h - k <= 12) {
            let p = exact_joint_fork_prob(h, k).unwrap().to_f64().unwrap();
            if (p - joint_prob(h, k)).abs() > 1e-12 * p {
                return outcome(false, format!("joint probability mismatch at (h={h}, k={k})"));
            }
            let n_min = (h as f64 / E).floor() as usize + 1;
            for n in n_min..=300 {
                let pairs = count_pairs_with_fork(n, h, k).unwrap().to_f64().unwrap();
                let closed = (n as f64).powi((2 * h - k) as i32) * (1.0 - 1.0 / n as f64);
                if (pairs - closed).abs() > 1e-9 * closed {
                    return outcome(false, format!("pair count mismatch at (n={n}, h={h}, k={k})"));
                }
                let r = (pairs * p).ln() - prop2_fork_term(n as f64 / h as f64, 0.0, h, k).unwrap();
                cases += 1;
                if r > worst {
                    (worst, at) = (r, format!("n={n}, h={h}, k={k}"));
                }
            }
            // exact/bound increases with n towards P (h/e)^(2h-k) / c_k
            let hf = h as f64;
            let c = if k == 1 {
                E / 4.0
            } else {
                E / 8.0 * hf / (((k - 1) as f64).sqrt() * (h - k + 1) as f64)
            };
            let limit = p.ln() + (2 * h - k) as f64 * (hf / E).ln() - c.ln();
            if limit > worst {
                (worst, at) = (limit, format!("n -> infinity, h={h}, k={k}"));
            }
        }
    }
    outcome(
        worst <= 0.0,
        format!("{cases} cases with n <= 300 plus the n -> infinity limit; max exact/bound {:.4} at {at}", worst.exp()),
    )
}

fn chernoff() -> Outcome {
    let mut worst: f64 = 0.0;
    for r in [10u64, 100, 1000] {
        for p in [0.1, 0.3, 0.5, 0.9] {
            let mean = r as f64 * p;
            let k = (mean / 2.0).floor() as u64;
            let direct: f64 = (0..=k)
                .map(|i| (binomial(r, i).ln() + i as f64 * p.ln() + (r - i) as f64 * (1.0 - p).ln()).exp())
                .sum();
            let tail = binomial_cdf(r, p, k);
            if (tail - direct).abs() > 1e-8 * direct {
                return outcome(false, format!("binomial tail mismatch at r={r}, p={p}: {tail} vs {direct}"));
            }
            worst = worst.max(tail / chernoff_bound(mean));
            assert!((chernoff_bound(mean) - (-mean / 8.0).exp()).abs() < 1e-15);
        }
    }
    outcome(worst <= 1.0, format!("max tail/exp(-mean/8) = {worst:.4e}"))
}

fn level_counts() -> Outcome {
    let (n, eps) = (100usize, 0.5);
    let params = ModelParams::new(n, 4).unwrap();
    let lc = LevelConfig::new(4, eps).unwrap();
    let ex = run_level_experiment(&params, &lc, 10_000, derive_seed(SEED, &[7]), 1).unwrap();
    let mut worst: f64 = 0.0;
    for (j, row) in (1..=4).zip(&ex.rows) {
        let expected = (n as f64 * eps / 4.0).powi(j);
        worst = worst.max((row.mean - expected).abs() / row.std_error);
    }
    let bound = 4.0 * (-(n as f64) * eps.powi(4) / 16384.0).exp();
    let bound_ok = (ex.level4_bound.raw - bound).abs() < 1e-12 && ex.failure.p_hat <= bound.min(1.0);
    outcome(
        worst <= 4.0 && bound_ok,
        format!("max |z| = {worst:.3}; {}", ex.bound_note()),
    )
}

fn tanh_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    for h in [3usize, 10, 100, 1000, 10_000] {
        let (sum, bound) = fork_sum_and_tanh_bound(h).unwrap();
        let hf = h as f64;
        let direct: f64 = (2..h).map(|k| 1.0 / (((k - 1) as f64).sqrt() * (h - k + 1) as f64)).sum();
        let closed = 2.0 / hf.sqrt() * ((hf - 1.0) / hf).sqrt().atanh();
        if (sum - direct).abs() > 1e-12 * direct || (bound - closed).abs() > 1e-12 * closed {
            return outcome(false, format!("sum or bound disagrees with direct evaluation at h = {h}"));
        }
        worst = worst.max(sum / bound);
    }
    outcome(worst < 1.0, format!("max sum/bound = {worst:.6}"))
}

fn phase_map() -> Outcome {
    let h = 24;
    let alphas = [0.25, 1.0 / E, 0.5, 0.75, 1.0, 1.2];
    let ns: Vec<usize> = alphas.iter().map(|&a| (a * h as f64 + 1e-9).floor() as usize).collect();
    let coupled = run_coupled_sweep(h, &ns, 10_000, derive_seed(SEED, &[9]), 1).unwrap();
    let cfg = SweepConfig {
        alpha_grid: alphas.to_vec(),
        h_grid: vec![h],
        trials_per_point: 10_000,
        master_seed: derive_seed(SEED, &[10]),
        workers: 1,
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg).unwrap();
    let (low, high) = (&rows[0], &rows[5]);
    let (p_low, p_high) = (low.p_hat.unwrap(), high.p_hat.unwrap());
    // E[N] = n^h / h! with n = 6
    let markov = (6f64.ln() * h as f64 - (1..=h).map(|i| (i as f64).ln()).sum::<f64>()).exp();
    let se = (p_low * (1.0 - p_low) / 1e4).sqrt();
    let margin = phase_margin();
    let a = coupled.violations == 0;
    let b = (low.markov_bound.unwrap() - markov).abs() < 1e-9 * markov && p_low <= markov + 4.0 * se;
    let c = p_high - p_low > margin;
    let rates: Vec<String> = rows.iter().map(|r| format!("{:.4}", r.p_hat.unwrap())).collect();
    outcome(
        a && b && c,
        format!(
            "n = {ns:?}; (a) {} violations; (b) p_hat {p_low} vs Markov {markov:.3e}; (c) gap {:.4} vs margin {margin:.4}; rates [{}]",
            coupled.violations,
            p_high - p_low,
            rates.join(", ")
        ),
    )
}

fn classifier() -> Outcome {
    let grid = default_classification_grid();
    let mut got = Vec::new();
    let mut ok = true;
    for (src, want) in [
        ("0", Verdict::TendsToZero),
        ("(log h)^2/h", Verdict::TendsToOne),
        ("(log h)/(2*h)", Verdict::Indeterminate),
    ] {
        let v = theorem2_classify(&grid, &HExpr::parse(src).unwrap(), DEFAULT_DIVERGENCE_THRESHOLD).verdict;
        ok &= v == want;
        got.push(format!("{src} -> {}", v.name()));
    }
    outcome(ok, got.join(", "))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let mut identical = true;
    for mode in [SweepMode::Exists, SweepMode::Count] {
        let mut outputs = Vec::new();
        for workers in [1, 2, 4] {
            let cfg = SweepConfig {
                alpha_grid: vec![0.25, 0.5, 1.0],
                h_grid: vec![8, 12, 16],
                eps: 0.1,
                trials_per_point: 2000,
                master_seed: 77,
                mode,
                workers,
                cap: 1000,
                ..SweepConfig::default()
            };
            let rows = run_sweep(&cfg).unwrap();
            let mut files = Vec::new();
            for format in [Format::Csv, Format::Json] {
                let path = dir.path().join(format!("{}-{workers}.{format:?}", mode.name()));
                std::fs::write(&path, render(&rows, format)).unwrap();
                files.push(std::fs::read(&path).unwrap());
            }
            outputs.push(files);
        }
        identical &= outputs.windows(2).all(|w| w[0] == w[1]);
    }
    outcome(identical, "exists and count sweeps, workers 1/2/4, CSV and JSON compared byte for byte")
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("1 fork partition identity", fork_partition, Duration::from_secs(10)),
        ("2 first moment", first_moment, Duration::from_secs(60)),
        ("3 floored ordering lemma", floor_lemma, Duration::from_secs(60)),
        ("4 stirling bracket", stirling, Duration::from_secs(1)),
        ("5 fork term domination", fork_domination, Duration::from_secs(30)),
        ("6 chernoff domination", chernoff, Duration::from_secs(5)),
        ("7 level counts", level_counts, Duration::from_secs(30)),
        ("8 inverse tanh sum bound", tanh_bound, Duration::from_secs(1)),
        ("9 phase transition map", phase_map, Duration::from_secs(600)),
        ("10 regime classifier", classifier, Duration::from_secs(1)),
        ("11 worker reproducibility", reproducibility, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let ok = out.ok && took < limit;
        failed += usize::from(!ok);
        println!(
            "{} {name}: {} [{:.2}s, limit {}s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}

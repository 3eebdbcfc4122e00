//! Probability of an increasing root-to-leaf path at one point.
//!
//! cargo run --example existence -- 0.5 24 10000

use accperc::moments::expected_paths;
use accperc::sampler::{estimate_exists, TrialConfig, TrialMode};
use accperc::ModelParams;

fn main() -> accperc::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let alpha: f64 = args.first().map_or(0.5, |s| s.parse().expect("alpha"));
    let h: usize = args.get(1).map_or(24, |s| s.parse().expect("height"));
    let trials: u64 = args.get(2).map_or(10_000, |s| s.parse().expect("trials"));

    let params = ModelParams::from_alpha(alpha, h)?;
    let est = estimate_exists(&TrialConfig::new(params, TrialMode::Exists), trials, 1)?;
    let markov = expected_paths(params.n(), h).log_value.exp().min(1.0);
    println!("{params}");
    println!("P(path exists) ~ {:.4}  95% CI [{:.4}, {:.4}]", est.p_hat, est.ci_lo, est.ci_hi);
    println!("Markov bound min(1, E[N]) = {markov:.4e}");
    Ok(())
}

//! Regenerates tests/fixtures/phase_margin.txt.
//!
//! Estimates existence at alpha = 0.25 and 1.2 (h = 24) with 10^5 trials on
//! an independent seed, then records the smallest gap a 10^4-trial run should
//! show: the z = 4 Wilson lower limit of the high rate minus the upper limit
//! of the low rate, both at 10^4 trials.

use accperc::experiments::{run_sweep, SweepConfig};
use accperc::stats::wilson_interval;

const CALIBRATION_TRIALS: u64 = 100_000;
const CHECK_TRIALS: u64 = 10_000;

fn main() -> accperc::Result<()> {
    let cfg = SweepConfig {
        alpha_grid: vec![0.25, 1.2],
        h_grid: vec![24],
        trials_per_point: CALIBRATION_TRIALS,
        master_seed: 0xCA11_B8A7E,
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..SweepConfig::default()
    };
    let rows = run_sweep(&cfg)?;
    let (low, high) = (rows[0].p_hat.unwrap(), rows[1].p_hat.unwrap());
    let scaled = |p: f64| (p * CHECK_TRIALS as f64).round() as u64;
    let (high_lo, _) = wilson_interval(scaled(high), CHECK_TRIALS, 4.0);
    let (_, low_hi) = wilson_interval(scaled(low), CHECK_TRIALS, 4.0);
    println!("# h = 24, {CALIBRATION_TRIALS} trials per alpha, master seed {}", cfg.master_seed);
    println!("# p_hat(alpha=0.25) = {low}");
    println!("# p_hat(alpha=1.2) = {high}");
    println!("# margin: z = 4 Wilson limits at {CHECK_TRIALS} trials");
    println!("margin = {}", high_lo - low_hi);
    Ok(())
}

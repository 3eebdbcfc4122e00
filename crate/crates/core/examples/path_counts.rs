//! Capped path counts, plain and restricted to the ramp region.

use accperc::moments::expected_paths;
use accperc::sampler::{count_stats, TrialConfig, TrialMode};
use accperc::ModelParams;

fn main() -> accperc::Result<()> {
    let params = ModelParams::new(6, 8)?.with_eps(0.1)?;
    let exact = expected_paths(6, 8);
    for mode in [TrialMode::Count, TrialMode::RestrictedCount] {
        let cfg = TrialConfig::new(params, mode).with_cap(100_000)?;
        let s = count_stats(&cfg, 20_000, 3)?;
        println!(
            "{:>16}: mean {:.4} +- {:.4} ({} saturated)",
            mode.name(),
            s.mean,
            s.std_error(),
            s.saturated_count
        );
    }
    println!("E[N] = 6^8/8! = {}", exact.exact.expect("small instance"));
    Ok(())
}

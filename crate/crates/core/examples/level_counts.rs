//! Subpaths whose i-th label lies in [(i-1) eps/J, i eps/J).

use accperc::experiments::run_level_experiment;
use accperc::sampler::LevelConfig;
use accperc::ModelParams;

fn main() -> accperc::Result<()> {
    let params = ModelParams::new(100, 4)?;
    let lc = LevelConfig::new(4, 0.5)?;
    let ex = run_level_experiment(&params, &lc, 10_000, 11, 1)?;
    for r in &ex.rows {
        println!("#M_{}: {:>10.3} +- {:<8.3} expected {:.3}", r.j, r.mean, r.std_error, r.expected);
    }
    println!("P(#M_4 <= {:.1}) ~ {}", ex.failure_threshold, ex.failure.p_hat);
    println!("{}", ex.bound_note());
    Ok(())
}

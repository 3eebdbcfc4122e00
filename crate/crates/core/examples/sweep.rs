//! Existence sweep over (alpha, h), written as CSV and JSON.

use accperc::experiments::{write_results, Format, SweepConfig};

fn main() -> accperc::Result<()> {
    let cfg = SweepConfig {
        alpha_grid: vec![0.25, 1.0 / std::f64::consts::E, 0.5, 0.75, 1.0],
        h_grid: vec![8, 16],
        trials_per_point: 2000,
        master_seed: 2024,
        ..SweepConfig::default()
    };
    let rows = accperc::experiments::run_sweep(&cfg)?;
    for r in &rows {
        println!(
            "h={:<3} alpha={:<6.4} n={:<3} p_hat={:.4} markov={:.3e}",
            r.h,
            r.alpha,
            r.n,
            r.p_hat.unwrap_or(f64::NAN),
            r.markov_bound.unwrap_or(f64::NAN)
        );
    }
    let dir = std::env::temp_dir();
    write_results(&rows, Format::Csv, &dir.join("sweep.csv"))?;
    write_results(&rows, Format::Json, &dir.join("sweep.json"))?;
    println!("wrote {}", dir.join("sweep.{csv,json}").display());
    Ok(())
}

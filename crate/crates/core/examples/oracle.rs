//! Exhaustive counts on a materialized tree: N, N_eps and the fork spectrum.

use accperc::oracle::{count_report, sample_full_tree};
use accperc::ModelParams;

fn main() -> accperc::Result<()> {
    let params = ModelParams::new(5, 5)?;
    for seed in 0..5 {
        let tree = sample_full_tree(&params, seed)?;
        let r = count_report(&tree, 0.05)?;
        println!(
            "seed {seed}: N = {:>2}, N_eps = {:>2}, spectrum {:?} (sum {} = {}^2)",
            r.n_paths,
            r.n_restricted,
            r.fork.counts,
            r.fork.total(),
            r.n_restricted
        );
    }
    Ok(())
}

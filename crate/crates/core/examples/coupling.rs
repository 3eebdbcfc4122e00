//! One tree read through every branching factor: child `i` keeps its label
//! whatever `n` is, so existence can only switch on as `n` grows.

use accperc::experiments::run_coupled_sweep;

fn main() -> accperc::Result<()> {
    let ns: Vec<usize> = (2..=16).collect();
    let sweep = run_coupled_sweep(16, &ns, 2000, 7, 1)?;
    for (n, est) in sweep.ns.iter().zip(&sweep.estimates) {
        let bar = "#".repeat((est.p_hat * 50.0).round() as usize);
        println!("n = {n:>2}  {:.3}  {bar}", est.p_hat);
    }
    println!("trials where existence switched off as n grew: {}", sweep.violations);
    Ok(())
}

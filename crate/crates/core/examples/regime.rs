//! Near-critical offsets n = floor(((1 + beta_h)/e) h).

use accperc::experiments::run_regime_sweep;
use accperc::expr::HExpr;
use accperc::stats::Z_95;

fn main() -> accperc::Result<()> {
    for src in ["0", "(log h)^2/h", "log(h)/(2*h)"] {
        let beta = HExpr::parse(src)?;
        let s = run_regime_sweep(&[10, 16, 22, 28], &beta, None, 1000, 5, 1, Z_95)?;
        println!("beta_h = {src}: {}", s.classification.verdict.name());
        for r in &s.rows {
            println!("  h={:<3} n={:<3} eps_h={:.3} p_hat={:.3}", r.h, r.n, r.eps_h, r.p_hat);
        }
    }
    Ok(())
}

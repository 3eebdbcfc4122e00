//! Exact second-moment contributions E[N^2(k)] against the per-fork bound.

use accperc::moments::prop2_fork_term;
use accperc::oracle::{count_pairs_with_fork, exact_joint_fork_prob};
use num_traits::ToPrimitive;

fn main() -> accperc::Result<()> {
    let (n, h) = (8, 6);
    let alpha = n as f64 / h as f64;
    println!(" k  pairs            P(both increasing)  exact E[N^2(k)]  bound");
    for k in 1..h {
        let pairs = count_pairs_with_fork(n, h, k)?;
        let p = exact_joint_fork_prob(h, k)?;
        let exact = pairs.to_f64().unwrap() * p.to_f64().unwrap();
        let bound = prop2_fork_term(alpha, 0.0, h, k)?.exp();
        println!("{k:>2}  {pairs:<15}  {p:<18}  {exact:<15.4}  {bound:.4}");
    }
    Ok(())
}

//! P(U_1 <= ... <= U_j, U_i >= i/(j+1)) = 1/(j+1)!, three ways.

use accperc::moments::{lemma_floor_prob, lemma_integrals};
use accperc::oracle::numeric_floor_ordering_prob;

fn main() -> accperc::Result<()> {
    for j in 2..=6 {
        let exact = lemma_floor_prob(j);
        let quad = lemma_integrals(j, 1e-11)?;
        let mc = numeric_floor_ordering_prob(j, 1_000_000, j as u64)?;
        println!("j = {j}: exact {exact}, quadrature {:.10}, monte carlo {:.6}", quad.p, mc.p_hat);
        for (i, v) in &quad.integrals {
            println!("    I_{i} = {v:.10}");
        }
    }
    Ok(())
}

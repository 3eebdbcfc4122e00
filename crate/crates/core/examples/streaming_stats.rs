//! Mergeable mean/variance and Wilson intervals.

use accperc::stats::{wilson_interval, StreamingStats, Z_95};

fn main() {
    let xs: Vec<f64> = (0..100_000).map(|i| ((i * 7919) % 1000) as f64 / 1000.0).collect();
    let whole: StreamingStats = xs.iter().copied().collect();
    let parts = xs
        .chunks(4096)
        .map(|c| c.iter().copied().collect::<StreamingStats>())
        .fold(StreamingStats::new(), |acc, s| acc.merge(&s));
    println!("sequential mean {:.12} var {:.12}", whole.mean, whole.variance());
    println!("merged     mean {:.12} var {:.12}", parts.mean, parts.variance());
    for (s, t) in [(0, 20), (3, 20), (50, 100), (20, 20)] {
        let (lo, hi) = wilson_interval(s, t, Z_95);
        println!("{s}/{t}: [{lo:.4}, {hi:.4}]");
    }
}

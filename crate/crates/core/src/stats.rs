//! Mergeable streaming moments and binomial interval estimates.

use serde::{Deserialize, Serialize};

/// Two-sided 95% normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Single-pass mean and variance with a parallel merge.
///
/// `saturated_count` records observations that hit a counting cap; they are
/// not folded into the moments because a capped value is only a lower bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StreamingStats {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub saturated_count: u64,
}

impl StreamingStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn update(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn record_saturated(&mut self) {
        self.saturated_count += 1;
    }

    pub fn merge(&self, other: &StreamingStats) -> StreamingStats {
        let saturated_count = self.saturated_count + other.saturated_count;
        if self.count == 0 {
            return StreamingStats {
                saturated_count,
                ..*other
            };
        }
        if other.count == 0 {
            return StreamingStats {
                saturated_count,
                ..*self
            };
        }
        let count = self.count + other.count;
        let (na, nb) = (self.count as f64, other.count as f64);
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * nb / count as f64;
        let m2 = self.m2 + other.m2 + delta * delta * na * nb / count as f64;
        StreamingStats {
            count,
            mean,
            m2,
            saturated_count,
        }
    }

    /// Unbiased sample variance; zero with fewer than two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return f64::NAN;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

impl Extend<f64> for StreamingStats {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.update(x);
        }
    }
}

impl FromIterator<f64> for StreamingStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = StreamingStats::new();
        s.extend(iter);
        s
    }
}

/// Wilson score interval for `successes` out of `trials`, clamped to [0, 1].
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials >= 1, "wilson_interval needs at least one trial");
    assert!(successes <= trials, "more successes than trials");
    assert!(z > 0.0, "z must be positive");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = p + z2 / (2.0 * n);
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let mut lo = ((centre - half) / denom).max(0.0);
    let mut hi = ((centre + half) / denom).min(1.0);
    if successes == 0 {
        lo = 0.0;
    }
    if successes == trials {
        hi = 1.0;
    }
    (lo.min(p), hi.max(p))
}

/// Binomial proportion estimate with its Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialEstimate {
    pub successes: u64,
    pub trials: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl TrialEstimate {
    pub fn new(successes: u64, trials: u64, z: f64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, z);
        TrialEstimate {
            successes,
            trials,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }

    /// Plug-in standard error `sqrt(p(1-p)/trials)`.
    pub fn std_error(&self) -> f64 {
        (self.p_hat * (1.0 - self.p_hat) / self.trials as f64).sqrt()
    }

    pub fn overlaps(&self, other: &TrialEstimate) -> bool {
        self.ci_lo <= other.ci_hi && other.ci_lo <= self.ci_hi
    }

    pub fn contains(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn single_update() {
        let mut s = StreamingStats::new();
        s.update(5.0);
        assert_eq!((s.count, s.mean, s.m2), (1, 5.0, 0.0));
    }

    #[test]
    fn small_sample_moments() {
        let s: StreamingStats = [1.0, 2.0, 3.0].into_iter().collect();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.variance(), 1.0);
    }

    #[test]
    fn uniform_draws() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s: StreamingStats = (0..1_000_000).map(|_| rng.random::<f64>()).collect();
        assert!((s.mean - 0.5).abs() < 4.0 * s.std_error());
        assert!((s.variance() - 1.0 / 12.0).abs() < 1e-3);
    }

    #[test]
    fn merge_identity_and_saturation() {
        let x: StreamingStats = [1.0, 4.0, 9.0].into_iter().collect();
        assert_eq!(x.merge(&StreamingStats::new()), x);
        assert_eq!(StreamingStats::new().merge(&x), x);
        let mut capped = StreamingStats::new();
        capped.record_saturated();
        assert_eq!(x.merge(&capped).saturated_count, 1);
        assert_eq!(x.merge(&capped).count, 3);
    }

    #[test]
    fn chunked_matches_sequential() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let values: Vec<f64> = (0..100_000).map(|_| rng.random::<f64>() * 100.0).collect();
        let sequential: StreamingStats = values.iter().copied().collect();
        let chunked = values
            .chunks(777)
            .map(|c| c.iter().copied().collect::<StreamingStats>())
            .fold(StreamingStats::new(), |acc, s| acc.merge(&s));
        assert_eq!(chunked.count, sequential.count);
        assert!(rel_close(chunked.mean, sequential.mean, 1e-10));
        assert!(rel_close(chunked.m2, sequential.m2, 1e-10));
    }

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 40, Z_95).0, 0.0);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 5e-4, "{lo}");
        assert!((hi - 0.5962).abs() < 5e-4, "{hi}");
        assert_eq!(wilson_interval(100, 100, 1.96).1, 1.0);
    }

    #[test]
    fn wilson_coverage() {
        // 1000 replications of Binomial(200, 0.3)
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let covered = (0..1000)
            .filter(|_| {
                let s = (0..200).filter(|_| rng.random::<f64>() < 0.3).count() as u64;
                TrialEstimate::new(s, 200, Z_95).contains(0.3)
            })
            .count();
        assert!(covered >= 930, "coverage {covered}/1000");
    }

    fn stats_of(v: &[f64]) -> StreamingStats {
        v.iter().copied().collect()
    }

    proptest! {
        #[test]
        fn merge_commutative_associative(
            a in prop::collection::vec(-1e3f64..1e3, 0..40),
            b in prop::collection::vec(-1e3f64..1e3, 0..40),
            c in prop::collection::vec(-1e3f64..1e3, 0..40),
        ) {
            let (a, b, c) = (stats_of(&a), stats_of(&b), stats_of(&c));
            let ab = a.merge(&b);
            let ba = b.merge(&a);
            prop_assert_eq!(ab.count, ba.count);
            prop_assert!(rel_close(ab.mean, ba.mean, 1e-10) || (ab.mean - ba.mean).abs() < 1e-9);
            prop_assert!(rel_close(ab.m2, ba.m2, 1e-10) || (ab.m2 - ba.m2).abs() < 1e-6);
            let left = ab.merge(&c);
            let right = a.merge(&b.merge(&c));
            prop_assert!(rel_close(left.mean, right.mean, 1e-10) || (left.mean - right.mean).abs() < 1e-9);
            prop_assert!(rel_close(left.m2, right.m2, 1e-10) || (left.m2 - right.m2).abs() < 1e-6);
            prop_assert!(left.m2 >= 0.0);
        }

        #[test]
        fn wilson_contains_p_hat(trials in 1u64..5000, frac in 0.0f64..=1.0, z in 0.5f64..4.0) {
            let s = ((trials as f64) * frac).round() as u64;
            let e = TrialEstimate::new(s, trials, z);
            prop_assert!(0.0 <= e.ci_lo && e.ci_lo <= e.p_hat && e.p_hat <= e.ci_hi && e.ci_hi <= 1.0);
        }

        #[test]
        fn wilson_width_shrinks(s in 0u64..50, t in 50u64..500, scale in 2u64..10) {
            let (lo1, hi1) = wilson_interval(s, t, Z_95);
            let (lo2, hi2) = wilson_interval(s * scale, t * scale, Z_95);
            prop_assert!(hi2 - lo2 <= hi1 - lo1 + 1e-15);
        }
    }
}

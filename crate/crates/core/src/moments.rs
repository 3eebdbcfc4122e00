//! Closed-form expectations and bounds for the path counts.
//!
//! Quantities that grow like `(alpha e)^h` are returned as natural logs;
//! exact rationals are used where the instance is small enough. Throughout,
//! `base` denotes `alpha (1 - eps) e`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::expr::HExpr;
use crate::model::ModelParams;
use crate::quadrature::chain_integral;

use std::f64::consts::E;

/// `ln(k!)`.
pub fn ln_factorial(k: usize) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

/// `ln(exp(a) + exp(b) + ...)` without overflow.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// `ln(alpha (1 - eps) e)`.
pub fn log_base(alpha: f64, eps: f64) -> f64 {
    (alpha * (1.0 - eps) * E).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedPaths {
    /// `ln(n^h / h!)`.
    pub log_value: f64,
    /// `n^h / h!` exactly, when `h <= 20` and `n <= 100`.
    pub exact: Option<BigRational>,
}

/// Expected number of increasing paths, `E[N] = n^h / h!`.
pub fn expected_paths(n: usize, h: usize) -> ExpectedPaths {
    let log_value = h as f64 * (n as f64).ln() - ln_factorial(h);
    let exact = (h <= 20 && n <= 100).then(|| {
        let num = BigInt::from(n).pow(h as u32);
        let den = (1..=h).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
        BigRational::new(num, den)
    });
    ExpectedPaths { log_value, exact }
}

/// `ln E[N]` with a real-valued branching factor `alpha h`.
pub fn log_expected_paths_real(alpha: f64, h: usize) -> f64 {
    h as f64 * (alpha * h as f64).ln() - ln_factorial(h)
}

/// `n! / (sqrt(n) (n/e)^n)`, evaluated in log space.
pub fn stirling_ratio(n: u64) -> f64 {
    assert!(n >= 1, "stirling_ratio needs n >= 1");
    let x = n as f64;
    (ln_gamma(x + 1.0) - 0.5 * x.ln() - x * x.ln() + x).exp()
}

/// `P(U_1 <= ... <= U_j, U_i >= i/(j+1))` for i.i.d. uniforms: `1/(j+1)!`.
pub fn lemma_floor_prob(j: usize) -> BigRational {
    assert!(j >= 1, "lemma_floor_prob needs j >= 1");
    let den = (1..=j + 1).fold(BigInt::one(), |acc, i| acc * BigInt::from(i));
    BigRational::new(BigInt::one(), den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaIntegrals {
    pub j: usize,
    /// The probability itself, integrated directly over the ordered region.
    pub p: f64,
    /// `(i, I_i)` for `i = 2..=j`.
    pub integrals: Vec<(usize, f64)>,
}

/// Evaluates the probability of the floored ordering event and each
/// intermediate integral `I_i` by nested adaptive quadrature. `I_i`
/// integrates `v^(i-1)/(i-1)! - v^(i-2)/((j+1)(i-2)!)` over
/// `i/(j+1) <= v_i <= v_(i+1) <= ... <= v_j <= 1` with `v_m >= m/(j+1)`.
pub fn lemma_integrals(j: usize, tol: f64) -> Result<LemmaIntegrals> {
    if !(2..=6).contains(&j) {
        return Err(Error::InvalidParams(format!("j = {j} must be in 2..=6")));
    }
    let scale = (j + 1) as f64;
    let lowers: Vec<f64> = (1..=j).map(|m| m as f64 / scale).collect();
    let p = chain_integral(&lowers, &|_| 1.0, 1.0, tol)?;
    let fact = |m: usize| (1..=m).map(|i| i as f64).product::<f64>();
    let mut integrals = Vec::with_capacity(j - 1);
    for i in 2..=j {
        let (a, b) = (fact(i - 1), scale * fact(i - 2));
        let f = move |v: f64| v.powi(i as i32 - 1) / a - v.powi(i as i32 - 2) / b;
        integrals.push((i, chain_integral(&lowers[i - 1..], &f, 1.0, tol)?));
    }
    Ok(LemmaIntegrals { j, p, integrals })
}

/// Largest deviation of `p` and the `I_i` from `1/(j+1)!`.
pub fn verify_lemma_recursion(j: usize, tolerance: f64) -> Result<f64> {
    let integrals = lemma_integrals(j, tolerance * 1e-3)?;
    let target = 1.0 / (1..=j + 1).map(|i| i as f64).product::<f64>();
    Ok(std::iter::once(integrals.p)
        .chain(integrals.integrals.iter().map(|&(_, v)| v))
        .map(|v| (v - target).abs())
        .fold(0.0, f64::max))
}

/// `ln` of the first-moment lower bound `base^h / (3 h^(3/2))` on `E[N_eps]`.
pub fn prop1_lower(alpha: f64, eps: f64, h: usize) -> f64 {
    let h = h as f64;
    h * log_base(alpha, eps) - 3f64.ln() - 1.5 * h.ln()
}

/// `ln` of the bound on `E[N_eps^2(k)]`: `(e/4) base^(2h-1)` for `k = 1`,
/// `(e/8) base^(2h-k) h / ((k-1)^(1/2) (h-k+1))` for `2 <= k <= h-1`.
pub fn prop2_fork_term(alpha: f64, eps: f64, h: usize, k: usize) -> Result<f64> {
    if k < 1 || k + 1 > h {
        return Err(Error::ForkOutOfRange { k, h });
    }
    let lb = log_base(alpha, eps);
    if k == 1 {
        return Ok((E / 4.0).ln() + (2 * h - 1) as f64 * lb);
    }
    Ok((E / 8.0).ln() + (2 * h - k) as f64 * lb + (h as f64).ln()
        - 0.5 * ((k - 1) as f64).ln()
        - ((h - k + 1) as f64).ln())
}

fn require_supercritical(alpha: f64, eps: f64) -> Result<()> {
    if log_base(alpha, eps) > 0.0 {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "alpha (1 - eps) e = {} must exceed 1",
            alpha * (1.0 - eps) * E
        )))
    }
}

/// `ln` of the explicit second-moment bound
/// `E + E^2 + sum_{k=1}^{h-1} prop2_fork_term(k)`. `log_mean` supplies
/// `ln E`; by default `E` is the unrestricted mean `(alpha h)^h / h!`,
/// which dominates `E[N_eps]`.
pub fn prop2_upper(alpha: f64, eps: f64, h: usize, log_mean: Option<f64>) -> Result<f64> {
    require_supercritical(alpha, eps)?;
    let lm = log_mean.unwrap_or_else(|| log_expected_paths_real(alpha, h));
    let mut terms = vec![lm, 2.0 * lm];
    for k in 1..h {
        terms.push(prop2_fork_term(alpha, eps, h, k)?);
    }
    Ok(log_sum_exp(&terms))
}

/// Paley-Zygmund lower bound `mean^2 / (4 second)` on `P(Z >= mean/2)`.
pub fn paley_zygmund_lower(mean: f64, second_moment: f64) -> Result<f64> {
    if !(mean > 0.0) || second_moment < mean * mean * (1.0 - 1e-12) {
        return Err(Error::Precondition(format!(
            "need second moment {second_moment} >= mean^2 = {} > 0",
            mean * mean
        )));
    }
    Ok((mean * mean / (4.0 * second_moment)).clamp(0.0, 1.0))
}

/// [`paley_zygmund_lower`] with both moments given as logs.
pub fn paley_zygmund_lower_log(log_mean: f64, log_second: f64) -> Result<f64> {
    if !log_mean.is_finite() || log_second < 2.0 * log_mean - 1e-9 {
        return Err(Error::Precondition(format!(
            "need ln second moment {log_second} >= 2 ln mean = {}",
            2.0 * log_mean
        )));
    }
    Ok((2.0 * log_mean - log_second - 4f64.ln()).exp().clamp(0.0, 1.0))
}

/// The ratio `prop2_upper(mean = L) / L^2` with `L` the first-moment lower
/// bound. Since `(E + E^2 + T) / E^2` decreases in `E`, this ratio bounds
/// `E[N_eps^2] / E[N_eps]^2` and plays the role of `c' h^3`.
pub fn second_moment_ratio(alpha: f64, eps: f64, h: usize) -> Result<f64> {
    let l = prop1_lower(alpha, eps, h);
    Ok((prop2_upper(alpha, eps, h, Some(l))? - 2.0 * l).exp())
}

/// Explicit Paley-Zygmund lower bound on `P(N_eps >= E[N_eps]/2)`:
/// `1 / (4 * second_moment_ratio)`.
pub fn explicit_pz_lower(alpha: f64, eps: f64, h: usize) -> Result<f64> {
    Ok((0.25 / second_moment_ratio(alpha, eps, h)?).clamp(0.0, 1.0))
}

/// Chernoff bound `exp(-mean/8)` on `P(Z <= mean/2)`.
pub fn chernoff_bound(mean: f64) -> f64 {
    assert!(mean >= 0.0, "mean must be non-negative");
    (-mean / 8.0).exp()
}

/// A probability bound with its unclamped value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbBound {
    pub raw: f64,
    pub clamped: f64,
}

impl ProbBound {
    pub fn new(raw: f64) -> Self {
        ProbBound {
            raw,
            clamped: raw.clamp(0.0, 1.0),
        }
    }

    pub fn is_vacuous(&self) -> bool {
        self.clamped >= 1.0
    }
}

/// `4 exp(-n eps^4 / 16384)`, bounding `P(#M_4 <= (n eps/8)^4)`.
pub fn level4_bound(n: usize, eps: f64) -> ProbBound {
    assert!(n >= 1 && (0.0..1.0).contains(&eps), "need n >= 1, eps in [0, 1)");
    ProbBound::new(4.0 * (-(n as f64) * eps.powi(4) / 16384.0).exp())
}

/// Union of the per-level Chernoff steps behind the `M_j` counts:
/// `sum_{j=1}^{J} exp(-(n eps / (2J))^j / 4)`, bounding
/// `P(#M_J <= (n eps / (2J))^J)`. For `J = 4` this is the sum that the
/// level-4 bound simplifies.
pub fn level_chain_bound(n: usize, eps: f64, levels: usize) -> ProbBound {
    let t = n as f64 * eps / (2.0 * levels as f64);
    let raw = (1..=levels as i32).map(|j| (-t.powi(j) / 4.0).exp()).sum();
    ProbBound::new(raw)
}

/// `(sum_{k=2}^{h-1} 1/((k-1)^(1/2) (h-k+1)), (2/sqrt h) atanh(sqrt((h-1)/h)))`.
pub fn fork_sum_and_tanh_bound(h: usize) -> Result<(f64, f64)> {
    if h < 3 {
        return Err(Error::InvalidParams(format!("h = {h} must be at least 3")));
    }
    let hf = h as f64;
    // summed from the small terms up
    let sum: f64 = (2..h)
        .rev()
        .map(|k| 1.0 / (((k - 1) as f64).sqrt() * (h - k + 1) as f64))
        .sum();
    let bound = 2.0 / hf.sqrt() * ((hf - 1.0) / hf).sqrt().atanh();
    Ok((sum, bound))
}

/// `ln` of `(e/4) base^(2h-1) + (e/8) h base^(2h) S(h)` with `S(h)` the
/// inverse-tanh bound: an envelope for the summed fork terms that grows
/// like `h^(1/2) log h base^(2h)`.
pub fn fork_tail_envelope(alpha: f64, eps: f64, h: usize) -> Result<f64> {
    require_supercritical(alpha, eps)?;
    let (_, s) = fork_sum_and_tanh_bound(h)?;
    let lb = log_base(alpha, eps);
    Ok(log_sum_exp(&[
        (E / 4.0).ln() + (2 * h - 1) as f64 * lb,
        (E / 8.0).ln() + (h as f64).ln() + 2.0 * h as f64 * lb + s.ln(),
    ]))
}

/// Supremum of the admissible growth exponents, `ln(alpha (1-eps) e)`,
/// when positive.
pub fn delta_max(alpha: f64, eps: f64) -> Option<f64> {
    let d = log_base(alpha, eps);
    (d > 0.0).then_some(d)
}

/// Every closed-form quantity for one parameter point. Bounds are evaluated
/// at the effective ratio `n / h`; logs are natural.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub alpha: f64,
    pub effective_alpha: f64,
    pub n: usize,
    pub h: usize,
    pub eps: f64,
    pub log_expected_paths: f64,
    pub stirling_lo: f64,
    pub stirling_hi: f64,
    /// `ln((alpha e)^h / (3 sqrt h))` and `ln((alpha e)^h / (2 sqrt h))`.
    pub log_mean_bracket_lo: f64,
    pub log_mean_bracket_hi: f64,
    pub markov_bound: f64,
    /// `ln` of the first-moment lower bound on `E[N_eps]`.
    pub prop1_lower: f64,
    /// `ln` of the explicit second-moment bound, when `base > 1`.
    pub prop2_upper: Option<f64>,
    pub pz_lower: Option<f64>,
    pub second_moment_ratio: Option<f64>,
    pub delta_max: Option<f64>,
}

impl MomentReport {
    pub fn compute(params: &ModelParams) -> Result<Self> {
        let (n, h, eps) = (params.n(), params.h(), params.eps());
        let a = params.effective_alpha();
        let hf = h as f64;
        let log_expected = expected_paths(n, h).log_value;
        let base_h = hf * (a * E).ln();
        let supercritical = log_base(a, eps) > 0.0;
        let l = prop1_lower(a, eps, h);
        let (prop2, pz, ratio) = if supercritical {
            let ratio = second_moment_ratio(a, eps, h)?;
            (
                Some(prop2_upper(a, eps, h, Some(l))?),
                Some((0.25 / ratio).clamp(0.0, 1.0)),
                Some(ratio),
            )
        } else {
            (None, None, None)
        };
        Ok(MomentReport {
            alpha: params.alpha_or_ratio(),
            effective_alpha: a,
            n,
            h,
            eps,
            log_expected_paths: log_expected,
            stirling_lo: 2.0,
            stirling_hi: 3.0,
            log_mean_bracket_lo: base_h - 3f64.ln() - 0.5 * hf.ln(),
            log_mean_bracket_hi: base_h - 2f64.ln() - 0.5 * hf.ln(),
            markov_bound: log_expected.exp().min(1.0),
            prop1_lower: l,
            prop2_upper: prop2,
            pz_lower: pz,
            second_moment_ratio: ratio,
            delta_max: delta_max(a, eps),
        })
    }

    /// `(name, value)` pairs in a fixed order, `None` rendered as `NA`.
    pub fn entries(&self) -> Vec<(&'static str, String)> {
        let opt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| format!("{v}"));
        vec![
            ("alpha", format!("{}", self.alpha)),
            ("effective_alpha", format!("{}", self.effective_alpha)),
            ("n", self.n.to_string()),
            ("h", self.h.to_string()),
            ("eps", format!("{}", self.eps)),
            ("log_expected_paths", format!("{}", self.log_expected_paths)),
            ("stirling_lo", format!("{}", self.stirling_lo)),
            ("stirling_hi", format!("{}", self.stirling_hi)),
            ("log_mean_bracket_lo", format!("{}", self.log_mean_bracket_lo)),
            ("log_mean_bracket_hi", format!("{}", self.log_mean_bracket_hi)),
            ("markov_bound", format!("{}", self.markov_bound)),
            ("log_prop1_lower", format!("{}", self.prop1_lower)),
            ("log_prop2_upper", opt(self.prop2_upper)),
            ("pz_lower", opt(self.pz_lower)),
            ("second_moment_ratio", opt(self.second_moment_ratio)),
            ("delta_max", opt(self.delta_max)),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    TendsToZero,
    TendsToOne,
    Indeterminate,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::TendsToZero => "tends_to_zero",
            Verdict::TendsToOne => "tends_to_one",
            Verdict::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeDiagnostic {
    pub h: f64,
    pub beta: f64,
    /// `log h - 2 h beta_h`.
    pub subcritical: f64,
    /// `h beta_h / log h`.
    pub supercritical: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub diagnostics: Vec<RegimeDiagnostic>,
    pub verdict: Verdict,
    /// Always true: divergence is judged on a finite grid.
    pub heuristic: bool,
    pub threshold: f64,
}

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 5.0;

/// Geometric grid of `points` heights from `h_min` to `h_max`, deduplicated.
pub fn geometric_grid(h_min: f64, h_max: f64, points: usize) -> Vec<f64> {
    let (a, b) = (h_min.ln(), h_max.ln());
    let mut grid: Vec<f64> = (0..points)
        .map(|i| (a + (b - a) * i as f64 / (points - 1).max(1) as f64).exp().round())
        .collect();
    grid.dedup();
    grid
}

/// Grid used when no explicit diagnostic grid is supplied.
pub fn default_classification_grid() -> Vec<f64> {
    geometric_grid(10.0, 1e8, 57)
}

fn diverges(values: &[f64], threshold: f64) -> bool {
    let tail = (values.len() / 4).max(2).min(values.len());
    let last = &values[values.len() - tail..];
    last.len() >= 2
        && last.windows(2).all(|w| w[1] > w[0])
        && *last.last().expect("non-empty") > threshold
}

/// Evaluates `log h - 2 h beta_h` and `h beta_h / log h` along `h_grid` and
/// calls a diagnostic divergent when it ends above `threshold` and strictly
/// increases over the last quarter of the grid.
pub fn theorem2_classify(h_grid: &[f64], beta: &HExpr, threshold: f64) -> Classification {
    let diagnostics: Vec<RegimeDiagnostic> = h_grid
        .iter()
        .map(|&h| {
            let b = beta.eval(h);
            RegimeDiagnostic {
                h,
                beta: b,
                subcritical: h.ln() - 2.0 * h * b,
                supercritical: h * b / h.ln(),
            }
        })
        .collect();
    let sub: Vec<f64> = diagnostics.iter().map(|d| d.subcritical).collect();
    let sup: Vec<f64> = diagnostics.iter().map(|d| d.supercritical).collect();
    let verdict = match (diverges(&sub, threshold), diverges(&sup, threshold)) {
        (true, false) => Verdict::TendsToZero,
        (false, true) => Verdict::TendsToOne,
        _ => Verdict::Indeterminate,
    };
    Classification {
        diagnostics,
        verdict,
        heuristic: true,
        threshold,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn expected_paths_examples() {
        assert_eq!(expected_paths(1, 1).exact.unwrap(), rat(1, 1));
        assert_eq!(expected_paths(2, 2).exact.unwrap(), rat(2, 1));
        assert_eq!(expected_paths(3, 3).exact.unwrap(), rat(9, 2));
        assert!((expected_paths(3, 3).log_value - 4.5f64.ln()).abs() < 1e-13);
        assert!(expected_paths(101, 3).exact.is_none());
        assert!(expected_paths(10, 21).exact.is_none());
    }

    #[test]
    fn expected_paths_by_order_statistics() {
        // Oracle: count increasing paths over every relative order of the
        // 6 labels of the (2, 2) tree. Root children a, b; a has c, d; b has e, f.
        let mut total = 0u64;
        let mut perms = 0u64;
        let mut ranks = [0u8, 1, 2, 3, 4, 5];
        loop {
            let [a, b, c, d, e, f] = ranks;
            total += [(a, c), (a, d), (b, e), (b, f)]
                .iter()
                .filter(|(x, y)| x < y)
                .count() as u64;
            perms += 1;
            // next permutation
            let mut i = 5;
            while i > 0 && ranks[i - 1] >= ranks[i] {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            let mut j = 5;
            while ranks[j] <= ranks[i - 1] {
                j -= 1;
            }
            ranks.swap(i - 1, j);
            ranks[i..].reverse();
        }
        assert_eq!(rat(total as i64, perms as i64), expected_paths(2, 2).exact.unwrap());
    }

    #[test]
    fn stirling_examples() {
        assert!((stirling_ratio(1) - E).abs() < 1e-13);
        assert!((stirling_ratio(2) - 2.0 / (2f64.sqrt() * (2.0 / E).powi(2))).abs() < 1e-13);
        // Stirling series: ln ratio = ln sqrt(2 pi) + 1/(12n) - 1/(360 n^3)
        let n = 1e6f64;
        let series = (0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * n)).exp();
        assert!((stirling_ratio(1_000_000) - series).abs() < 1e-8);
        assert!((stirling_ratio(1_000_000) - 2.506_628).abs() < 1e-5);
    }

    #[test]
    fn stirling_bracket() {
        for n in 1..=10_000u64 {
            let r = stirling_ratio(n);
            assert!(2.0 < r && r < 3.0, "n = {n}: {r}");
        }
    }

    #[test]
    fn lemma_values() {
        assert_eq!(lemma_floor_prob(1), rat(1, 2));
        assert_eq!(lemma_floor_prob(2), rat(1, 6));
        assert_eq!(lemma_floor_prob(4), rat(1, 120));
    }

    #[test]
    fn lemma_quadrature() {
        assert!(verify_lemma_recursion(2, 1e-9).unwrap() < 1e-9);
        assert!(verify_lemma_recursion(3, 1e-9).unwrap() < 1e-9);
        assert!(verify_lemma_recursion(5, 1e-8).unwrap() < 1e-8);
        assert!(verify_lemma_recursion(1, 1e-8).is_err());
        let li = lemma_integrals(4, 1e-12).unwrap();
        assert_eq!(li.integrals.len(), 3);
        assert!((li.p - 1.0 / 120.0).abs() < 1e-12);
    }

    #[test]
    fn prop1_examples() {
        let h = 37;
        let v = prop1_lower(1.0 / E, 0.0, h);
        assert!((v - (-(3f64.ln()) - 1.5 * (h as f64).ln())).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for i in 0..10 {
            let v = prop1_lower(0.7, i as f64 / 10.0, 40);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn prop1_below_small_instance_mean() {
        // n = 2, h = 2, eps = 0: E[N_0] = 4 P(U in I ∩ D_0) = 4 * 3/8 = 1.5
        let bound = prop1_lower(1.0, 0.0, 2).exp();
        assert!(bound <= 1.5, "{bound}");
    }

    #[test]
    fn fork_term_forms() {
        let lb = log_base(0.8, 0.1);
        let k1 = prop2_fork_term(0.8, 0.1, 10, 1).unwrap();
        assert!((k1 - ((E / 4.0).ln() + 19.0 * lb)).abs() < 1e-12);
        assert!(prop2_fork_term(0.8, 0.1, 10, 0).is_err());
        assert!(prop2_fork_term(0.8, 0.1, 10, 10).is_err());
    }

    #[test]
    fn fork_term_dominates_exact_example() {
        // alpha = 1, eps = 0, n = h = 4, k = 2
        use crate::oracle::{count_pairs_with_fork, exact_joint_fork_prob};
        let pairs = count_pairs_with_fork(4, 4, 2).unwrap().to_f64().unwrap();
        let prob = exact_joint_fork_prob(4, 2).unwrap().to_f64().unwrap();
        let bound = prop2_fork_term(1.0, 0.0, 4, 2).unwrap().exp();
        assert!(pairs * prob <= bound, "{} > {bound}", pairs * prob);
    }

    #[test]
    fn prop2_degenerate_and_small_exact() {
        let e = 2f64.ln();
        let v = prop2_upper(1.0, 0.0, 2, Some(e)).unwrap();
        let expect = (2.0 + 4.0 + E / 4.0 * E.powi(3)).ln();
        assert!((v - expect).abs() < 1e-12);
        // exact E[N^2] for n = h = 2 is 16/3
        assert!(16.0 / 3.0 <= prop2_upper(1.0, 0.0, 2, None).unwrap().exp());
        assert!(prop2_upper(0.3, 0.0, 10, None).is_err());
    }

    #[test]
    fn second_moment_ratio_grows_like_h_cubed() {
        for &(alpha, eps) in &[(0.5, 0.1), (1.0, 0.3), (0.45, 0.05)] {
            let c: Vec<f64> = (3..=200)
                .map(|h| second_moment_ratio(alpha, eps, h).unwrap() / (h as f64).powi(3))
                .collect();
            let fitted = c.iter().copied().fold(0.0, f64::max);
            assert!(fitted.is_finite() && fitted > 0.0);
            // the tail is flat or decreasing: c'(h) does not blow up
            let tail = &c[c.len() - 50..];
            assert!(tail.last().unwrap() <= &(tail[0] * 1.05), "alpha={alpha}");
        }
    }

    #[test]
    fn paley_zygmund_examples() {
        assert_eq!(paley_zygmund_lower(2.0, 4.0).unwrap(), 0.25);
        assert_eq!(paley_zygmund_lower(3.0, 9.0).unwrap(), 0.25);
        assert!(paley_zygmund_lower(2.0, 3.0).is_err());
        assert!(paley_zygmund_lower(0.0, 1.0).is_err());
        assert!((paley_zygmund_lower_log(2f64.ln(), 4f64.ln()).unwrap() - 0.25).abs() < 1e-15);
        let eps = 0.2; // 0.5 * 0.8 * e = 1.087
        let pz = explicit_pz_lower(0.5, eps, 50).unwrap();
        let c_prime = second_moment_ratio(0.5, eps, 50).unwrap() / 50f64.powi(3);
        assert!(pz > 0.0);
        assert!((pz - 1.0 / (4.0 * c_prime * 50f64.powi(3))).abs() <= 1e-12 * pz.max(1e-300));
    }

    #[test]
    fn chernoff_examples() {
        assert_eq!(chernoff_bound(0.0), 1.0);
        assert!((chernoff_bound(8.0) - (-1f64).exp()).abs() < 1e-15);
        let tail = crate::oracle::binomial_cdf(100, 0.5, 25);
        assert!(tail <= chernoff_bound(50.0));
        assert!((chernoff_bound(50.0) - 1.930_454e-3).abs() < 1e-8);
    }

    #[test]
    fn level4_examples() {
        assert_eq!(level4_bound(1000, 0.0).clamped, 1.0);
        assert!(level4_bound(1000, 1e-6).is_vacuous());
        let b = level4_bound(16384, 0.999_999_999);
        assert!(b.raw > 1.47 && b.clamped == 1.0);
        let b = level4_bound(10_000_000, 0.5);
        let exponent: f64 = 1e7 * 0.0625 / 16384.0;
        assert!((b.raw - 4.0 * (-exponent).exp()).abs() < 1e-30);
        assert!(b.raw < 1e-15);
    }

    #[test]
    fn chain_bound_is_sharper_at_four_levels() {
        let chain = level_chain_bound(100, 0.5, 4);
        assert!(chain.raw < 0.25 && chain.raw > 0.2);
        assert!(chain.raw <= level4_bound(100, 0.5).raw);
    }

    #[test]
    fn tanh_examples() {
        let (s, b) = fork_sum_and_tanh_bound(3).unwrap();
        assert_eq!(s, 0.5);
        assert!((b - 1.323_536).abs() < 1e-6, "{b}");
        for h in [10usize, 100, 1000, 10_000] {
            let (s, b) = fork_sum_and_tanh_bound(h).unwrap();
            assert!(s < b, "h = {h}");
        }
        let h = 100f64;
        let (_, b) = fork_sum_and_tanh_bound(100).unwrap();
        let ratio = b / (h.ln() / h.sqrt());
        assert!(ratio > 0.5 && ratio < 2.0, "{ratio}");
        assert!(fork_sum_and_tanh_bound(2).is_err());
    }

    #[test]
    fn envelope_dominates_finite_sum() {
        for &(alpha, eps) in &[(0.5, 0.1), (0.38, 0.0), (1.0, 0.5)] {
            for h in [5usize, 30, 300] {
                let terms: Vec<f64> = (1..h).map(|k| prop2_fork_term(alpha, eps, h, k).unwrap()).collect();
                assert!(log_sum_exp(&terms) <= fork_tail_envelope(alpha, eps, h).unwrap() + 1e-12);
            }
        }
    }

    #[test]
    fn report_invariants() {
        for &(alpha, eps, h) in &[(0.5, 0.2, 50usize), (0.25, 0.0, 24), (1.2, 0.1, 24), (1.0 / E, 0.0, 100)] {
            let p = ModelParams::from_alpha(alpha, h).unwrap().with_eps(eps).unwrap();
            let r = MomentReport::compute(&p).unwrap();
            assert!(r.prop1_lower <= r.log_expected_paths);
            assert!(r.log_mean_bracket_lo < r.log_expected_paths);
            assert!(r.log_expected_paths < r.log_mean_bracket_hi);
            if let Some(pz) = r.pz_lower {
                assert!((0.0..=1.0).contains(&pz));
            }
            assert_eq!(r.delta_max.is_some(), r.effective_alpha * (1.0 - eps) * E > 1.0);
        }
    }

    #[test]
    fn mean_bracket_for_integer_alpha_h() {
        for h in 1..=300usize {
            for n in [1usize, h / 3 + 1, h, 2 * h] {
                let a = n as f64 / h as f64;
                let base = h as f64 * (a * E).ln() - 0.5 * (h as f64).ln();
                let l = expected_paths(n, h).log_value;
                assert!(base - 3f64.ln() < l && l < base - 2f64.ln(), "n={n} h={h}");
            }
        }
    }

    #[test]
    fn classifier_examples() {
        let grid = default_classification_grid();
        let zero = HExpr::parse("0").unwrap();
        assert_eq!(theorem2_classify(&grid, &zero, 5.0).verdict, Verdict::TendsToZero);
        let sq = HExpr::parse("(log h)^2/h").unwrap();
        assert_eq!(theorem2_classify(&grid, &sq, 5.0).verdict, Verdict::TendsToOne);
        let gap = HExpr::parse("log(h)/(2*h)").unwrap();
        let c = theorem2_classify(&grid, &gap, 5.0);
        assert_eq!(c.verdict, Verdict::Indeterminate);
        assert!(c.diagnostics.iter().all(|d| d.subcritical.abs() < 1e-9));
        assert!(c.diagnostics.iter().all(|d| (d.supercritical - 0.5).abs() < 1e-12));
        assert!(c.heuristic);
    }
}

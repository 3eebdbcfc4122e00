//! Parameters and the label-space vocabulary: the increasing region `I`, the
//! floor region `C_eps`, the ramp region `D_eps`, and fork depths between
//! root-to-leaf paths.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative nudge applied before flooring `alpha * h`, so that products such
/// as `0.29 * 100` that land a few ulps below an integer still floor to it.
const FLOOR_SLACK: f64 = 1e-12;

fn floor_branching(scale: f64, h: usize) -> Result<usize> {
    let raw = scale * h as f64;
    if !raw.is_finite() || raw < 0.0 {
        return Err(Error::InvalidParams(format!(
            "branching factor {raw} is not a finite non-negative number"
        )));
    }
    let n = (raw * (1.0 + FLOOR_SLACK)).floor();
    if n < 1.0 {
        return Err(Error::InvalidParams(format!(
            "floor({scale} * {h}) = {n} leaves no children"
        )));
    }
    if n > u32::MAX as f64 {
        return Err(Error::InvalidParams(format!("branching factor {n} too large")));
    }
    Ok(n as usize)
}

fn check_eps(eps: f64) -> Result<()> {
    if (0.0..1.0).contains(&eps) {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("eps = {eps} is outside [0, 1)")))
    }
}

/// One instance of the model: an `n`-ary tree of height `h`, optionally
/// specified through `alpha = n / h`, and a region floor `eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    h: usize,
    alpha: Option<f64>,
    eps: f64,
}

impl ModelParams {
    pub fn new(n: usize, h: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if h == 0 {
            return Err(Error::InvalidParams("h must be at least 1".into()));
        }
        if n > u32::MAX as usize {
            return Err(Error::InvalidParams(format!("branching factor {n} too large")));
        }
        Ok(ModelParams {
            n,
            h,
            alpha: None,
            eps: 0.0,
        })
    }

    /// `n = floor(alpha * h)`; the supplied alpha is kept for reporting.
    pub fn from_alpha(alpha: f64, h: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParams(format!("alpha = {alpha} must be positive")));
        }
        if h == 0 {
            return Err(Error::InvalidParams("h must be at least 1".into()));
        }
        let n = floor_branching(alpha, h)?;
        Ok(ModelParams {
            n,
            h,
            alpha: Some(alpha),
            eps: 0.0,
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        self.eps = eps;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> usize {
        self.h
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// The alpha the instance was built from, if any.
    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    /// `n / h`, the ratio the bounds are actually evaluated at.
    pub fn effective_alpha(&self) -> f64 {
        self.n as f64 / self.h as f64
    }

    /// The reported alpha: the supplied one, else `n / h`.
    pub fn alpha_or_ratio(&self) -> f64 {
        self.alpha.unwrap_or_else(|| self.effective_alpha())
    }

    /// Number of non-root vertices, `n + n^2 + ... + n^h`, saturating.
    pub fn vertex_count(&self) -> u128 {
        let n = self.n as u128;
        let mut level = 1u128;
        let mut total = 0u128;
        for _ in 0..self.h {
            level = level.saturating_mul(n);
            total = total.saturating_add(level);
        }
        total
    }

    /// Number of root-to-leaf paths `n^h`, saturating.
    pub fn path_count(&self) -> u128 {
        (self.n as u128).saturating_pow(self.h.min(u32::MAX as usize) as u32)
    }
}

impl fmt::Display for ModelParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alpha {
            Some(a) => write!(f, "alpha={a} n={} h={} eps={}", self.n, self.h, self.eps),
            None => write!(f, "n={} h={} eps={}", self.n, self.h, self.eps),
        }
    }
}

/// Near-critical instance `n = floor(((1 + beta) / e) h)` with floor `eps_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeParams {
    pub h: usize,
    pub beta: f64,
    pub eps_h: f64,
    n: usize,
}

impl RegimeParams {
    pub fn new(h: usize, beta: f64, eps_h: f64) -> Result<Self> {
        if h == 0 {
            return Err(Error::InvalidParams("h must be at least 1".into()));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta = {beta} is not finite")));
        }
        check_eps(eps_h)?;
        let n = floor_branching((1.0 + beta) / std::f64::consts::E, h)?;
        Ok(RegimeParams { h, beta, eps_h, n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> f64 {
        (1.0 + self.beta) / std::f64::consts::E
    }

    pub fn model(&self) -> ModelParams {
        ModelParams {
            n: self.n,
            h: self.h,
            alpha: Some(self.alpha()),
            eps: self.eps_h,
        }
    }
}

/// Labels `X(u_1), ..., X(u_h)` read along one root-to-leaf path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelVector(Vec<f64>);

impl LabelVector {
    pub fn new(labels: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidParams("label vector is empty".into()));
        }
        if let Some(bad) = labels.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParams(format!("label {bad} outside [0, 1]")));
        }
        Ok(LabelVector(labels))
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

impl Deref for LabelVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Child index taken at each level, starting below the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PathAddress(Vec<u32>);

impl PathAddress {
    pub fn new(children: Vec<u32>, n: usize, h: usize) -> Result<Self> {
        if children.len() > h {
            return Err(Error::InvalidParams(format!(
                "address of length {} exceeds height {h}",
                children.len()
            )));
        }
        if let Some(bad) = children.iter().find(|&&c| c as usize >= n) {
            return Err(Error::InvalidParams(format!("child index {bad} >= n = {n}")));
        }
        Ok(PathAddress(children))
    }

    /// Address without range validation, for callers that build indices
    /// from a known tree shape.
    pub fn from_indices(children: Vec<u32>) -> Self {
        PathAddress(children)
    }

    pub fn root() -> Self {
        PathAddress(Vec::new())
    }

    pub fn child(&self, index: u32) -> Self {
        let mut children = self.0.clone();
        children.push(index);
        PathAddress(children)
    }

    pub fn children(&self) -> &[u32] {
        &self.0
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }
}

/// True iff the entries strictly increase. Ties are not increasing.
pub fn in_increasing(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] < w[1])
}

/// True iff every entry is at least `eps`.
pub fn in_floor_region(x: &[f64], eps: f64) -> bool {
    x.iter().all(|&v| v >= eps)
}

/// Lower boundary of `D_eps` at 1-based level `j` of a height-`h` tree:
/// `eps + (1 - eps)(j - 1)/h`.
#[inline]
pub fn ramp_threshold(eps: f64, j: usize, h: usize) -> f64 {
    eps + (1.0 - eps) * ((j - 1) as f64 / h as f64)
}

/// True iff `x_j >= eps + (1 - eps)(j - 1)/h` for every `j`.
pub fn in_ramp_region(x: &[f64], eps: f64, h: usize) -> bool {
    x.iter()
        .enumerate()
        .all(|(i, &v)| v >= ramp_threshold(eps, i + 1, h))
}

/// `a(u, v)`: the number of leading child indices the two paths share.
pub fn fork_depth(u: &PathAddress, v: &PathAddress) -> Result<usize> {
    fork_depth_slices(u.children(), v.children())
}

pub(crate) fn fork_depth_slices(u: &[u32], v: &[u32]) -> Result<usize> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    Ok(u.iter().zip(v).take_while(|(a, b)| a == b).count())
}

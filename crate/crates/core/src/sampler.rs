//! Lazy Monte Carlo over trees that are never materialized.
//!
//! Labels are derived on demand from the vertex address (see [`crate::stream`]),
//! so a trial touches only the vertices its depth-first search reaches. A
//! child is entered only if its label exceeds the label of its parent on the
//! current path (and, in restricted mode, clears the ramp threshold of its
//! level); children are explored in index order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ramp_threshold, ModelParams};
use crate::stats::{StreamingStats, TrialEstimate, Z_95};
use crate::stream::{derive_seed, VertexKey};

pub const DEFAULT_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialMode {
    Exists,
    Count,
    RestrictedExists,
    RestrictedCount,
}

impl TrialMode {
    pub fn name(self) -> &'static str {
        match self {
            TrialMode::Exists => "exists",
            TrialMode::Count => "count",
            TrialMode::RestrictedExists => "restricted_exists",
            TrialMode::RestrictedCount => "restricted_count",
        }
    }

    fn restricted(self) -> bool {
        matches!(self, TrialMode::RestrictedExists | TrialMode::RestrictedCount)
    }

    fn counts(self) -> bool {
        matches!(self, TrialMode::Count | TrialMode::RestrictedCount)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub params: ModelParams,
    pub cap: u64,
    pub coupled_max_n: Option<usize>,
    pub mode: TrialMode,
}

impl TrialConfig {
    pub fn new(params: ModelParams, mode: TrialMode) -> Self {
        TrialConfig {
            params,
            cap: DEFAULT_CAP,
            coupled_max_n: None,
            mode,
        }
    }

    pub fn with_cap(mut self, cap: u64) -> Result<Self> {
        if cap == 0 {
            return Err(Error::InvalidParams("cap must be at least 1".into()));
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn with_coupling(mut self, n_max: usize) -> Result<Self> {
        if n_max < self.params.n() {
            return Err(Error::InvalidParams(format!(
                "coupling range {n_max} below n = {}",
                self.params.n()
            )));
        }
        self.coupled_max_n = Some(n_max);
        Ok(self)
    }

    fn floors(&self) -> Vec<f64> {
        level_floors(&self.params, self.mode.restricted())
    }
}

/// Minimum label accepted at each level (1-based level `j` at index `j-1`).
fn level_floors(params: &ModelParams, restricted: bool) -> Vec<f64> {
    let h = params.h();
    if restricted {
        (1..=h).map(|j| ramp_threshold(params.eps(), j, h)).collect()
    } else {
        vec![0.0; h]
    }
}

/// Depth-first walk over accepted vertices. `on_leaf` is called for every
/// accepted path reaching depth `floors.len()`; returning `true` stops the
/// walk. Returns whether the walk was stopped.
fn walk<F>(root: VertexKey, n: u32, floors: &[f64], mut on_leaf: F) -> bool
where
    F: FnMut() -> bool,
{
    let h = floors.len();
    // (vertex, its label, next child index to try)
    let mut stack: Vec<(VertexKey, f64, u32)> = Vec::with_capacity(h + 1);
    stack.push((root, f64::NEG_INFINITY, 0));
    while let Some(top) = stack.last_mut() {
        if top.2 == n {
            stack.pop();
            continue;
        }
        let (key, value, index) = (top.0, top.1, top.2);
        top.2 += 1;
        let depth = stack.len() - 1;
        let child = key.child(index);
        let x = child.label();
        if x > value && x >= floors[depth] {
            if depth + 1 == h {
                if on_leaf() {
                    return true;
                }
            } else {
                stack.push((child, x, 0));
            }
        }
    }
    false
}

/// Whether some accepted path reaches depth `floors.len()`. Children are
/// tried in increasing label order, which finds a path after far less
/// backtracking than index order; the answer is the same.
fn search(root: VertexKey, n: u32, floors: &[f64]) -> bool {
    let h = floors.len();
    // frontier[d]: admissible children at depth d + 1, largest label first
    let mut frontier: Vec<Vec<(f64, VertexKey)>> = vec![Vec::with_capacity(n as usize); h];
    let expand = |into: &mut Vec<(f64, VertexKey)>, key: VertexKey, value: f64, depth: usize| {
        into.clear();
        for i in 0..n {
            let child = key.child(i);
            let x = child.label();
            if x > value && x >= floors[depth] {
                into.push((x, child));
            }
        }
        into.sort_unstable_by(|a, b| b.0.total_cmp(&a.0));
    };
    expand(&mut frontier[0], root, f64::NEG_INFINITY, 0);
    let mut depth = 0;
    loop {
        match frontier[depth].pop() {
            None if depth == 0 => return false,
            None => depth -= 1,
            Some(_) if depth + 1 == h => return true,
            Some((x, key)) => {
                depth += 1;
                let (_, rest) = frontier.split_at_mut(depth);
                expand(&mut rest[0], key, x, depth);
            }
        }
    }
}

fn expect_mode(cfg: &TrialConfig, want_count: bool) -> Result<()> {
    if cfg.mode.counts() != want_count {
        return Err(Error::ModeMismatch {
            expected: if want_count {
                "count or restricted_count"
            } else {
                "exists or restricted_exists"
            },
            found: cfg.mode.name(),
        });
    }
    Ok(())
}

/// Whether the tree of `seed` has an increasing root-to-leaf path (inside
/// `D_eps` in restricted mode).
pub fn simulate_exists(cfg: &TrialConfig, seed: u64) -> Result<bool> {
    expect_mode(cfg, false)?;
    let floors = cfg.floors();
    Ok(search(VertexKey::root(seed), cfg.params.n() as u32, &floors))
}

/// Existence indicators for `n = 1..=n_max` on one coupled tree: the
/// `n`-child tree uses the first `n` children of every vertex of the
/// `n_max`-child tree. Each `n` is searched independently.
pub fn simulate_exists_coupled(params: &ModelParams, n_max: usize, seed: u64) -> Result<Vec<bool>> {
    if n_max == 0 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let floors = level_floors(params, false);
    let root = VertexKey::root(seed);
    Ok((1..=n_max as u32)
        .map(|n| search(root, n, &floors))
        .collect())
}

/// Existence indicators at the listed branching factors on one coupled tree.
pub fn simulate_exists_coupled_at(h: usize, ns: &[usize], seed: u64) -> Vec<bool> {
    let floors = vec![0.0; h];
    let root = VertexKey::root(seed);
    ns.iter().map(|&n| search(root, n as u32, &floors)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CappedCount {
    pub count: u64,
    pub saturated: bool,
}

/// Number of increasing paths (restricted to `D_eps` in restricted mode),
/// stopping at `cfg.cap`.
pub fn simulate_count_capped(cfg: &TrialConfig, seed: u64) -> Result<CappedCount> {
    expect_mode(cfg, true)?;
    let floors = cfg.floors();
    let cap = cfg.cap;
    let mut count = 0u64;
    let saturated = walk(VertexKey::root(seed), cfg.params.n() as u32, &floors, || {
        count += 1;
        count >= cap
    });
    Ok(CappedCount { count, saturated })
}

/// Level structure for the `M_j` counts: level `i` labels must fall in
/// `[(i-1) w / J, i w / J)` where `w = width_eps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelConfig {
    pub levels: usize,
    pub width_eps: f64,
}

impl LevelConfig {
    pub fn new(levels: usize, width_eps: f64) -> Result<Self> {
        if levels == 0 {
            return Err(Error::InvalidParams("need at least one level".into()));
        }
        if !(0.0..1.0).contains(&width_eps) {
            return Err(Error::InvalidParams(format!(
                "band width {width_eps} outside [0, 1)"
            )));
        }
        Ok(LevelConfig { levels, width_eps })
    }

    /// The half-open label interval of 1-based level `j`.
    pub fn interval(&self, j: usize) -> (f64, f64) {
        let step = self.width_eps / self.levels as f64;
        ((j - 1) as f64 * step, j as f64 * step)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCounts {
    /// `counts[j - 1] = #M_j`.
    pub counts: Vec<u64>,
}

/// Exact `#M_1, ..., #M_J` by breadth expansion of the surviving subpaths.
pub fn simulate_level_counts(params: &ModelParams, lc: &LevelConfig, seed: u64) -> Result<LevelCounts> {
    if lc.levels > params.h() {
        return Err(Error::InvalidParams(format!(
            "{} levels exceed height {}",
            lc.levels,
            params.h()
        )));
    }
    let n = params.n() as u32;
    let mut frontier = vec![VertexKey::root(seed)];
    let mut counts = Vec::with_capacity(lc.levels);
    for j in 1..=lc.levels {
        let (lo, hi) = lc.interval(j);
        let last = j == lc.levels;
        let mut next = Vec::new();
        let mut count = 0u64;
        for key in &frontier {
            for i in 0..n {
                let child = key.child(i);
                let x = child.label();
                if lo <= x && x < hi {
                    count += 1;
                    if !last {
                        next.push(child);
                    }
                }
            }
        }
        counts.push(count);
        frontier = next;
    }
    Ok(LevelCounts { counts })
}

/// Sequential existence estimate; trial `t` uses `derive_seed(seed, [t])`.
pub fn estimate_exists(cfg: &TrialConfig, trials: u64, seed: u64) -> Result<TrialEstimate> {
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let mut hits = 0u64;
    for t in 0..trials {
        if simulate_exists(cfg, derive_seed(seed, &[t]))? {
            hits += 1;
        }
    }
    Ok(TrialEstimate::new(hits, trials, Z_95))
}

/// Sequential capped-count statistics; saturated trials are censored.
pub fn count_stats(cfg: &TrialConfig, trials: u64, seed: u64) -> Result<StreamingStats> {
    let mut stats = StreamingStats::new();
    for t in 0..trials {
        let c = simulate_count_capped(cfg, derive_seed(seed, &[t]))?;
        if c.saturated {
            stats.record_saturated();
        } else {
            stats.update(c.count as f64);
        }
    }
    Ok(stats)
}

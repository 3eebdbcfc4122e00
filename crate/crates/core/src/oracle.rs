//! Ground truth for small instances.
//!
//! Everything here is brute force or exact arithmetic: full trees are
//! materialized and every root-to-leaf path is checked, fork spectra are
//! built by pairing paths, and fork probabilities are exact rationals.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{fork_depth_slices, in_increasing, in_ramp_region, ModelParams, PathAddress};
use crate::stats::{StreamingStats, TrialEstimate, Z_95};
use crate::stream::{derive_seed, VertexKey};

/// Largest tree (non-root vertex count) that [`sample_full_tree`] builds.
pub const MAX_TREE_VERTICES: u128 = 10_000_000;

/// Largest `2h - k` accepted by [`exact_joint_fork_prob`].
pub const MAX_FORK_LABELS: usize = 12;

/// Largest `2h - k` accepted by [`enumerate_joint_fork_prob`].
pub const MAX_ENUMERATED_LABELS: usize = 10;

/// Above this many restricted paths the spectrum is computed by prefix
/// grouping instead of explicit pairing.
const PAIRING_LIMIT: usize = 20_000;

/// A fully materialized labelled tree, stored level by level.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledTree {
    params: ModelParams,
    labels: Vec<f64>,
    offsets: Vec<usize>,
}

fn check_tree_size(params: &ModelParams) -> Result<()> {
    let vertices = params.vertex_count();
    if vertices > MAX_TREE_VERTICES {
        return Err(Error::SizeExceeded {
            vertices,
            limit: MAX_TREE_VERTICES,
        });
    }
    Ok(())
}

fn level_offsets(n: usize, h: usize) -> Vec<usize> {
    let mut offsets = Vec::with_capacity(h + 1);
    let (mut off, mut width) = (0usize, 1usize);
    for _ in 0..h {
        width *= n;
        offsets.push(off);
        off += width;
    }
    offsets.push(off);
    offsets
}

impl LabelledTree {
    /// Builds a tree from explicit labels in level order (all depth-1
    /// vertices, then depth 2, ...; children of a vertex are contiguous).
    pub fn from_labels(params: ModelParams, labels: Vec<f64>) -> Result<Self> {
        check_tree_size(&params)?;
        let offsets = level_offsets(params.n(), params.h());
        if labels.len() != offsets[params.h()] {
            return Err(Error::InvalidParams(format!(
                "expected {} labels, got {}",
                offsets[params.h()],
                labels.len()
            )));
        }
        if let Some(bad) = labels.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidParams(format!("label {bad} outside [0, 1]")));
        }
        Ok(LabelledTree {
            params,
            labels,
            offsets,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn labels(&self) -> &[f64] {
        &self.labels
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    /// Label of the vertex at `address` (depth >= 1).
    pub fn label(&self, address: &PathAddress) -> Option<f64> {
        let depth = address.depth();
        if depth == 0 || depth > self.params.h() {
            return None;
        }
        let n = self.params.n();
        let mut pos = 0usize;
        for &c in address.children() {
            if c as usize >= n {
                return None;
            }
            pos = pos * n + c as usize;
        }
        Some(self.labels[self.offsets[depth - 1] + pos])
    }

    /// Writes the labels along leaf number `leaf` (lexicographic order) into
    /// `labels` and its child indices into `digits`.
    fn read_path(&self, leaf: usize, digits: &mut [u32], labels: &mut [f64]) {
        let n = self.params.n();
        let h = self.params.h();
        let mut rest = leaf;
        for j in (0..h).rev() {
            digits[j] = (rest % n) as u32;
            rest /= n;
        }
        let mut pos = 0usize;
        for j in 0..h {
            pos = pos * n + digits[j] as usize;
            labels[j] = self.labels[self.offsets[j] + pos];
        }
    }
}

/// Materializes the tree drawn from `seed`. Labels come from the shared
/// per-address derivation, so the lazy sampler sees the same tree.
pub fn sample_full_tree(params: &ModelParams, seed: u64) -> Result<LabelledTree> {
    check_tree_size(params)?;
    let (n, h) = (params.n(), params.h());
    let offsets = level_offsets(n, h);
    let mut labels = Vec::with_capacity(offsets[h]);
    let mut keys = vec![VertexKey::root(seed)];
    for _ in 0..h {
        let mut next = Vec::with_capacity(keys.len() * n);
        for key in &keys {
            for i in 0..n as u32 {
                let child = key.child(i);
                labels.push(child.label());
                next.push(child);
            }
        }
        keys = next;
    }
    Ok(LabelledTree {
        params: *params,
        labels,
        offsets,
    })
}

/// `counts[k]` is the number of ordered pairs of restricted increasing paths
/// with fork depth exactly `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForkSpectrum {
    pub counts: Vec<u64>,
}

impl ForkSpectrum {
    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountReport {
    /// `N`: increasing paths.
    pub n_paths: u64,
    /// `N_eps`: increasing paths inside the ramp region `D_eps`.
    pub n_restricted: u64,
    pub exists: bool,
    pub fork: ForkSpectrum,
}

/// Exhaustive path counts and the fork spectrum of the restricted paths.
pub fn count_report(tree: &LabelledTree, eps: f64) -> Result<CountReport> {
    count_report_by(tree, eps, in_increasing)
}

/// [`count_report`] with a caller-supplied increasing-path predicate.
pub fn count_report_by<F>(tree: &LabelledTree, eps: f64, increasing: F) -> Result<CountReport>
where
    F: Fn(&[f64]) -> bool,
{
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::InvalidParams(format!("eps = {eps} is outside [0, 1)")));
    }
    let h = tree.params.h();
    let leaves = tree.offsets[h] - tree.offsets[h - 1];
    let mut digits = vec![0u32; h];
    let mut labels = vec![0.0; h];
    let mut n_paths = 0u64;
    let mut restricted: Vec<Vec<u32>> = Vec::new();
    let mut restricted_leaves: Vec<usize> = Vec::new();
    for leaf in 0..leaves {
        tree.read_path(leaf, &mut digits, &mut labels);
        if increasing(&labels) {
            n_paths += 1;
            if in_ramp_region(&labels, eps, h) {
                restricted_leaves.push(leaf);
                if restricted_leaves.len() <= PAIRING_LIMIT {
                    restricted.push(digits.clone());
                }
            }
        }
    }
    let fork = if restricted_leaves.len() <= PAIRING_LIMIT {
        spectrum_by_pairing(&restricted, h)
    } else {
        spectrum_by_prefix_groups(&restricted_leaves, tree.params.n(), h)
    };
    Ok(CountReport {
        n_paths,
        n_restricted: restricted_leaves.len() as u64,
        exists: n_paths >= 1,
        fork,
    })
}

/// Fork spectrum by comparing every ordered pair of paths.
pub fn spectrum_by_pairing(paths: &[Vec<u32>], h: usize) -> ForkSpectrum {
    let mut counts = vec![0u64; h + 1];
    for u in paths {
        for v in paths {
            let k = fork_depth_slices(u, v).expect("paths of equal length");
            counts[k] += 1;
        }
    }
    ForkSpectrum { counts }
}

/// Fork spectrum from group sizes: the number of ordered pairs with fork
/// depth at least `k` is the sum of squared path counts below each depth-`k`
/// vertex. `leaves` must be sorted lexicographic leaf indices.
pub fn spectrum_by_prefix_groups(leaves: &[usize], n: usize, h: usize) -> ForkSpectrum {
    let total = leaves.len() as u64;
    let mut at_least = vec![0u64; h + 2];
    at_least[0] = total * total;
    let mut block = n.pow(h as u32);
    for slot in at_least.iter_mut().take(h + 1).skip(1) {
        block /= n;
        let mut sum = 0u64;
        let mut i = 0;
        while i < leaves.len() {
            let prefix = leaves[i] / block.max(1);
            let mut j = i;
            while j < leaves.len() && leaves[j] / block.max(1) == prefix {
                j += 1;
            }
            let c = (j - i) as u64;
            sum += c * c;
            i = j;
        }
        *slot = sum;
    }
    let counts = (0..=h).map(|k| at_least[k] - at_least[k + 1]).collect();
    ForkSpectrum { counts }
}

/// Ordered path pairs with fork depth exactly `k`:
/// `n^k * n(n-1) * n^(2(h-k-1))` for `k < h`, and `n^h` for `k = h`.
pub fn count_pairs_with_fork(n: usize, h: usize, k: usize) -> Result<BigUint> {
    if k > h {
        return Err(Error::ForkOutOfRange { k, h });
    }
    let nb = BigUint::from(n);
    if k == h {
        return Ok(nb.pow(h as u32));
    }
    let split = BigUint::from(n) * BigUint::from(n.saturating_sub(1));
    Ok(nb.pow(k as u32) * split * nb.pow(2 * (h - k - 1) as u32))
}

/// Probability that a uniformly random linear order of a rooted forest poset
/// (every vertex below its children) is a linear extension. For a forest
/// this is `1 / prod(subtree sizes)`. `parents[v]` is the predecessor of `v`.
fn forest_extension_probability(parents: &[Option<usize>]) -> BigRational {
    let mut size = vec![1u64; parents.len()];
    // Parents precede children in the encoding used below.
    for v in (0..parents.len()).rev() {
        if let Some(p) = parents[v] {
            size[p] += size[v];
        }
    }
    let denom = size
        .iter()
        .fold(BigUint::one(), |acc, &s| acc * BigUint::from(s));
    BigRational::new(1.into(), denom.into())
}

/// The poset of two height-`h` chains glued along their first `k` labels:
/// shared labels `0..k`, then the two tails.
fn fork_poset(h: usize, k: usize) -> Vec<Option<usize>> {
    let mut parents = Vec::with_capacity(2 * h - k);
    for i in 0..k {
        parents.push(if i == 0 { None } else { Some(i - 1) });
    }
    for _tail in 0..2 {
        let start = parents.len();
        for j in 0..h - k {
            parents.push(match (j, k) {
                (0, 0) => None,
                (0, _) => Some(k - 1),
                _ => Some(start + j - 1),
            });
        }
    }
    parents
}

fn check_fork_args(h: usize, k: usize, limit: usize) -> Result<()> {
    if h == 0 {
        return Err(Error::InvalidParams("h must be at least 1".into()));
    }
    if k > h {
        return Err(Error::ForkOutOfRange { k, h });
    }
    if 2 * h - k > limit {
        return Err(Error::Infeasible(format!(
            "2h - k = {} exceeds {limit}",
            2 * h - k
        )));
    }
    Ok(())
}

/// Exact probability that two label chains of length `h` sharing their first
/// `k` labels are both strictly increasing.
pub fn exact_joint_fork_prob(h: usize, k: usize) -> Result<BigRational> {
    check_fork_args(h, k, MAX_FORK_LABELS)?;
    Ok(forest_extension_probability(&fork_poset(h, k)))
}

fn next_permutation(v: &mut [u8]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Same quantity as [`exact_joint_fork_prob`], by enumerating all
/// `(2h - k)!` relative orders of the distinct labels.
pub fn enumerate_joint_fork_prob(h: usize, k: usize) -> Result<BigRational> {
    check_fork_args(h, k, MAX_ENUMERATED_LABELS)?;
    let total = 2 * h - k;
    let mut ranks: Vec<u8> = (0..total as u8).collect();
    let tail = h - k;
    let (mut u, mut v) = (vec![0.0; h], vec![0.0; h]);
    let mut good = 0u64;
    let mut all = 0u64;
    loop {
        for i in 0..k {
            u[i] = ranks[i] as f64;
            v[i] = ranks[i] as f64;
        }
        for j in 0..tail {
            u[k + j] = ranks[k + j] as f64;
            v[k + j] = ranks[k + tail + j] as f64;
        }
        if in_increasing(&u) && in_increasing(&v) {
            good += 1;
        }
        all += 1;
        if !next_permutation(&mut ranks) {
            break;
        }
    }
    Ok(BigRational::new(good.into(), all.into()))
}

/// Monte Carlo estimate of `P(U, V in I ∩ D_0)` for two chains sharing their
/// first `k` labels.
pub fn numeric_joint_ramp_prob(h: usize, k: usize, samples: u64, seed: u64) -> Result<TrialEstimate> {
    if h == 0 || h > 30 {
        return Err(Error::InvalidParams(format!("h = {h} must be in 1..=30")));
    }
    if k > h {
        return Err(Error::ForkOutOfRange { k, h });
    }
    if samples == 0 {
        return Err(Error::InvalidParams("need at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut u, mut v) = (vec![0.0; h], vec![0.0; h]);
    let mut hits = 0u64;
    for _ in 0..samples {
        for i in 0..k {
            let x = rng.random::<f64>();
            u[i] = x;
            v[i] = x;
        }
        for i in k..h {
            u[i] = rng.random();
            v[i] = rng.random();
        }
        let inside = |x: &[f64]| in_increasing(x) && in_ramp_region(x, 0.0, h);
        if inside(&u) && inside(&v) {
            hits += 1;
        }
    }
    Ok(TrialEstimate::new(hits, samples, Z_95))
}

/// Monte Carlo frequency of `U_1 <= ... <= U_j` with `U_i >= i/(j+1)`.
pub fn numeric_floor_ordering_prob(j: usize, samples: u64, seed: u64) -> Result<TrialEstimate> {
    if j == 0 || samples == 0 {
        return Err(Error::InvalidParams("need j >= 1 and at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = (j + 1) as f64;
    let mut hits = 0u64;
    for _ in 0..samples {
        let mut prev = 0.0;
        let mut ok = true;
        // draw all j labels so the stream position never depends on the outcome
        for i in 1..=j {
            let x: f64 = rng.random();
            ok &= x >= prev && x >= i as f64 / scale;
            prev = x;
        }
        hits += u64::from(ok);
    }
    Ok(TrialEstimate::new(hits, samples, Z_95))
}

/// Fraction of materialized trees containing an increasing path. Trial `t`
/// uses the tree of seed `derive_seed(seed, [t])`, the same convention as
/// the lazy sampler's estimators.
pub fn estimate_exist_prob_bruteforce(params: &ModelParams, trials: u64, seed: u64) -> Result<TrialEstimate> {
    check_tree_size(params)?;
    if trials == 0 {
        return Err(Error::InvalidParams("need at least one trial".into()));
    }
    let mut hits = 0u64;
    for t in 0..trials {
        let tree = sample_full_tree(params, derive_seed(seed, &[t]))?;
        if count_report(&tree, 0.0)?.exists {
            hits += 1;
        }
    }
    Ok(TrialEstimate::new(hits, trials, Z_95))
}

/// Mean of the exact path count `N` over `trees` materialized trees.
pub fn path_count_stats(params: &ModelParams, trees: u64, seed: u64) -> Result<StreamingStats> {
    check_tree_size(params)?;
    let mut stats = StreamingStats::new();
    for t in 0..trees {
        let tree = sample_full_tree(params, derive_seed(seed, &[t]))?;
        stats.update(count_report(&tree, 0.0)?.n_paths as f64);
    }
    Ok(stats)
}

/// `P(Z <= k)` for `Z ~ Binomial(r, p)`, summed term by term in log space.
pub fn binomial_cdf(r: u64, p: f64, k: u64) -> f64 {
    assert!((0.0..=1.0).contains(&p), "p outside [0, 1]");
    if k >= r {
        return 1.0;
    }
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return 0.0;
    }
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    let mut log_coeff = 0.0f64;
    let mut terms = Vec::with_capacity(k as usize + 1);
    for i in 0..=k {
        if i > 0 {
            log_coeff += ((r - i + 1) as f64).ln() - (i as f64).ln();
        }
        terms.push(log_coeff + i as f64 * lp + (r - i) as f64 * lq);
    }
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

//! Counter-style label derivation.
//!
//! A vertex label is a pure function of the master seed and the vertex
//! address, so a tree can be regenerated lazily in any traversal order, split
//! across threads, or read through a different branching factor. Because the
//! label of child `i` does not depend on `n`, the `n`-ary tree is literally
//! the subtree of the `(n + 1)`-ary tree spanned by child indices `< n`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
const ROOT_SALT: u64 = 0x5851_F42D_4C95_7F2D;
const TRIAL_SALT: u64 = 0x2545_F491_4F6C_DD1D;

/// SplitMix64 output function.
#[inline]
pub const fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

const TAGS: usize = 256;

const fn child_tag(index: u64) -> u64 {
    mix64(index.wrapping_add(1).wrapping_mul(GOLDEN))
}

static CHILD_TAGS: [u64; TAGS] = {
    let mut t = [0u64; TAGS];
    let mut i = 0;
    while i < TAGS {
        t[i] = child_tag(i as u64);
        i += 1;
    }
    t
};

/// Digest identifying one vertex of one tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VertexKey(u64);

impl VertexKey {
    /// Key of the (unlabelled) root for the tree drawn from `seed`.
    #[inline]
    pub fn root(seed: u64) -> Self {
        VertexKey(mix64(seed ^ ROOT_SALT))
    }

    #[inline]
    pub fn child(self, index: u32) -> Self {
        let tag = match CHILD_TAGS.get(index as usize) {
            Some(&t) => t,
            None => child_tag(index as u64),
        };
        VertexKey(mix64(self.0.rotate_left(23) ^ tag))
    }

    /// Uniform label in `[0, 1)`: the top 53 bits of the key.
    #[inline]
    pub fn label(self) -> f64 {
        (self.0 >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}

/// Label at an explicit address of the tree drawn from `seed`.
pub fn label_at(seed: u64, address: &[u32]) -> f64 {
    address
        .iter()
        .fold(VertexKey::root(seed), |k, &i| k.child(i))
        .label()
}

/// Per-trial seed derived from a master seed and a list of indices
/// (point index, trial index, ...). Independent of scheduling.
pub fn derive_seed(master: u64, indices: &[u64]) -> u64 {
    indices
        .iter()
        .fold(mix64(master ^ TRIAL_SALT), |acc, &i| {
            mix64(acc ^ mix64(i.wrapping_add(GOLDEN)))
        })
}

//! Accessibility percolation on regular n-ary trees.
//!
//! Every vertex of an n-ary tree of height h except the root carries an
//! i.i.d. uniform label. A root-to-leaf path is *accessible* when its labels
//! strictly increase. This crate estimates the probability that such a path
//! exists, evaluates the first and second moment bounds for the number of
//! accessible paths, and checks both against exact small-instance oracles.
//!
//! Module map:
//!
//! * [`model`]: parameters, label vectors, the regions `I`, `C_eps`, `D_eps`
//!   and fork depths.
//! * [`stream`]: counter-style label derivation shared by every sampler.
//! * [`oracle`]: full-tree enumeration and exact combinatorics.
//! * [`sampler`]: lazy depth-first Monte Carlo that never materializes the tree.
//! * [`moments`]: closed-form expectations and bounds in log space.
//! * [`stats`]: mergeable streaming statistics and Wilson intervals.
//! * [`experiments`]: reproducible sweeps, persistence and the verification suite.
//! * [`cli`]: the `accperc` command-line front end.

pub mod cli;
pub mod error;
pub mod experiments;
pub mod expr;
pub mod model;
pub mod moments;
pub mod oracle;
pub mod quadrature;
pub mod sampler;
pub mod stats;
pub mod stream;

pub use error::{Error, Result};
pub use model::{LabelVector, ModelParams, PathAddress, RegimeParams};
pub use stats::{StreamingStats, TrialEstimate};

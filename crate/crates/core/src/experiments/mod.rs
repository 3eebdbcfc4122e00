//! Reproducible experiments: existence sweeps over `(alpha, h)`, near-critical
//! regime sweeps, level-count experiments, the verification suite, and
//! CSV/JSON persistence.
//!
//! Trial `t` of grid point `i` always uses seed
//! `derive_seed(derive_seed(master_seed, [i]), [t])`, and floating-point
//! statistics are merged in fixed chunks, so outputs do not depend on the
//! number of workers.

pub mod io;
pub mod levels;
pub mod regime;
pub mod sweep;
pub mod verify;

pub use io::{read_results, render, write_results, Format, Record};
pub use levels::{run_level_experiment, LevelExperiment, LevelRow};
pub use regime::{run_regime_sweep, RegimeRow, RegimeSweep};
pub use sweep::{
    run_coupled_sweep, run_sweep, run_sweep_detailed, CoupledSweep, SweepConfig, SweepMode, SweepOutput, SweepRow,
    DEFAULT_TRIALS,
};
pub use verify::{run_verification_suite, Budget, CheckResult, Fault, Status, SuiteOptions, VerificationReport};

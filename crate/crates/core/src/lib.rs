//! Bayesian optimization of black-box functions with a Gaussian-process
//! surrogate (Matérn 5/2 kernel), Expected Improvement or Probability of
//! Improvement acquisitions, and two bounded inner optimizers for the
//! acquisition surface: limited-memory BFGS and truncated Newton.
//!
//! ```
//! use bayesopt::{run_bo, BoConfig};
//!
//! let config = BoConfig { iterations: 2, n_restarts: 4, ..BoConfig::default() };
//! let report = run_bo(&mut config.objective().unwrap(), &config).unwrap();
//! assert_eq!(report.trials.len(), 2);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acquisition;
pub mod driver;
mod error;
pub mod gp;
pub mod kernel;
pub mod objective;
pub mod optimize;
pub mod stats;

pub use acquisition::{AcquisitionConfig, AcquisitionKind, Incumbent};
pub use driver::{
    first_iteration_snapshot, run_bo, run_bo_observed, BlackBox, BoConfig, FirstIterationSnapshot, GpSnapshot,
    Observation, RunError, RunObserver, RunReport, TrialRecord,
};
pub use error::{Error, Result};
pub use gp::{Dataset, GpPosterior};
pub use kernel::KernelParams;
pub use objective::NoisyObjective;
pub use optimize::{Bounds, Method, OptimizerReport, OptimizerSettings};

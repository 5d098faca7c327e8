//! Simulator and analysis toolkit for Local SGD: `N` workers run SGD
//! independently and periodically replace their iterates by the
//! across-worker average.
//!
//! The crate provides communication schedules (including linearly growing
//! intervals), step-size sequences, three experiment objectives with their
//! noise models, a deterministic counter-based random source, a replication
//! runner with speed-up curves, and closed-form error bounds.

pub mod bounds;
mod error;
pub mod experiment;
pub mod model;
pub mod objectives;
pub mod rng;
pub mod schedules;
pub mod simulator;

pub use error::{Error, Result};
pub use model::{Point, ProblemConstants};
pub use rng::{gaussian_draw, RngStream};
pub use schedules::{beta_min, check_beta_condition, CommSchedule, StepSchedule};
pub use simulator::{run_local_sgd, LocalSgd, RunResult};

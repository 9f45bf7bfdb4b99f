//! Experiment runner for the radwave laboratory: configuration documents,
//! file formats, orchestration of runs and sweeps, reports and the
//! built-in acceptance suite.

pub mod config;
pub mod corpus;
pub mod error;
pub mod io;
pub mod metrics;
pub mod report;
pub mod run;
pub mod selftest;
pub mod sweep;

pub use config::{ExperimentConfig, GridSpec, Mode, ProfileSpec};
pub use error::{LabError, LabResult};
pub use report::{report, report_dir, Report};
pub use run::{run, Check, RunSummary};
pub use selftest::{selftest, Scale};
pub use sweep::{sweep, Axis};

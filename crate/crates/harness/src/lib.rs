//! Config-driven experiment harness for the fixed-point iteration library:
//! loads declarative experiment descriptions, validates every theorem
//! hypothesis it can check, evaluates the rate certificates, streams the
//! orbit, and emits deterministic JSON/CSV reports.

pub mod config;
pub mod experiment;
pub mod report;

pub use config::{load_config, ExperimentConfig};
pub use experiment::{run_experiment, run_suite, validate_only, RunOptions};
pub use report::{emit_report, ExperimentReport, Format};

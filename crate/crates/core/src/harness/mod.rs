//! Experiment plumbing: JSON configuration, seeded instance generation, repeated
//! trials with per-trial seeds, summary statistics, and the invariant suite.

mod config;
mod runner;
mod stats;
mod suite;
mod verify;

pub use config::{ExperimentConfig, InstanceSpec, PartnerSpec, TesterKind};
pub use runner::{
    build_instance, derive_seed, run_experiment, run_experiment_custom, run_experiment_with,
    Instance, InstanceSummary, QueryStats, TestReport, TrialRecord,
};
pub use stats::{wilson_interval, WILSON_Z95};
pub use suite::{reference_functions, reference_partitions, SUITE_RHOS};
pub use verify::{verify_suite, verify_suite_with, CheckResult, VerifyLevel, VerifySummary};

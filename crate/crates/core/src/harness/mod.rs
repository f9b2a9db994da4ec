//! Experiment orchestration: decoding controllers, scoring them, running
//! replicated evolutions and writing metrics.

pub mod config;
pub mod controller;
pub mod experiment;
pub mod metrics;
pub mod svg;

pub use config::{Algorithm, ExperimentConfig, SamSet};
pub use controller::{aptitude, evaluate, evaluate_set, voxel_inputs, Evaluation, Phenotype};
pub use experiment::{report, run_experiment, run_once, Champion, ExperimentSummary, RunOutcome, RunSummary};

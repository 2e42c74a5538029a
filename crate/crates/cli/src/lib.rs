//! Experiment harness comparing the encoding pipelines: samples ensembles,
//! builds each selected encoder, runs one instrumented encode per trial,
//! optionally verifies parity and count fidelity, and renders per-trial and
//! averaged complexity tables.

pub mod experiment;

pub use experiment::{
    run_experiment, EnsembleSpec, ExperimentConfig, ExperimentError, Metric, Report, TrialRecord,
};

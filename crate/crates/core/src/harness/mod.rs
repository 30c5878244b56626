//! Experiment orchestration: configuration, Monte Carlo coverage trials,
//! sweeps, dataset and model production, and the files they write.

mod config;
mod experiment;
mod output;
pub mod pipeline;

pub use config::{ChannelConfig, DatasetSize, ExperimentConfig, SweepGrids, SweepPoint, WindowRule};
pub use experiment::{
    association_histogram, build_policies, coverage_over, coverage_probability, generate_dataset, model_points,
    run_trial, run_trial_all, sweep, train_model, trial_scenario, trial_seed, wilson_interval, CoverageResult,
    ModelSet, Stream, SweepAxis, TrialOutcome, MAX_RETRIES, Z95,
};
pub use output::{sweep_svg, write_histogram_csv, write_metrics_csv, write_results_csv};

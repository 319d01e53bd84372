//! Experiment configuration, seeded parallel runs, aggregation and output.

mod aggregate;
mod config;
mod csv_io;
mod plot;
mod runner;

pub use aggregate::{
    final_log_length, final_quartile_reward, log_length_curve, mean_stderr, pooled_stderr,
    summarize, sweep_table, write_sweep_table, SweepRow, REWARD_METRIC,
};
pub use config::{ExperimentConfig, FeatureConfig};
pub use csv_io::{emit_csv, parse_csv, render_csv, CSV_HEADER};
pub use plot::{emit_plot, render_plot, PlotKind};
pub use runner::{
    agent_stream, run_experiment, run_many, run_seed, run_single, sweep, ExperimentResult,
    RunRecord, SweepSpec, FEATURE_STREAM,
};

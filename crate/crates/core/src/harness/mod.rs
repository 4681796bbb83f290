//! Experiment configuration, built-in presets, runs, CSV output and report
//! comparison.

mod config;
mod csv;
mod expr;
mod run;

pub use config::{
    parse_config, preset, preset_names, preset_text, BoundaryKind, ExperimentConfig, Model, Problem, LAMBDA_MAX,
};
pub use csv::{compare, emit_csv, load_report, norm_diff, relative_l2, snapshot_file, ErrorRow, Norm, SUMMARY_FILE};
pub use expr::Expr;
pub use run::{run_experiment, run_experiment_with, RunReport, Snapshot};

//! Library half of the `lgae` binary: configuration, the experiment
//! runner, report rendering, and reference checking.

pub mod config;
pub mod experiment;
pub mod reference;
pub mod report;

pub use config::{build_config, config_from_text_with_overrides, ExperimentConfig, TaskKind};
pub use experiment::run_experiment;
pub use reference::{compare_against_reference, parse_reference, Verdict};
pub use report::{load_report, parse_report, render_report, OutputFormat, RunReport};

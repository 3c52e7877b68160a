//! Direction-subset experiments: coverage checks, presets, end-to-end runs
//! and result tables.

pub mod config;
pub mod coverage;
pub mod run;
pub mod table;

pub use config::{preset, CorpusFiles, EvalFiles, ExperimentConfig, PRESET_NAMES};
pub use coverage::{validate_direction_coverage, CoverageReport};
pub use run::{run_experiment, train_experiment_model, ExperimentData, ExperimentOutcome, Manifest, RunOptions};
pub use table::{reference_baselines, summarize, Cell, ResultTable, Summary};

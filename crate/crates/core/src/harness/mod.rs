//! Experiment harness: configuration, scenario generation, batch runs and
//! CSV reports.

use std::path::PathBuf;

use thiserror::Error;

use crate::bayes::BayesError;
use crate::strategies::StrategyError;
use crate::topology::TopologyError;

pub mod config;
pub mod experiment;
pub mod failures;
pub mod report;

pub use config::{
    BudgetMode, DynamicSection, ExperimentConfig, FailureMode, ModelSection, RunSection, TopologySection,
};
pub use experiment::{view_classification, Experiment};
pub use failures::generate_failures;
pub use report::{write_dynamic, write_static, DetectionRow, DynamicRow, ReportRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}: {1}")]
    Io(PathBuf, String),
    #[error("config: {0}")]
    Syntax(String),
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Strategy(#[from] StrategyError),
    #[error("worker pool: {0}")]
    Pool(String),
}

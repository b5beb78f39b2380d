//! Benchmark harness for the `fraclap` solvers: a registry of named cases,
//! single runs written as CSV, differences between runs, and the
//! comparison studies.

pub mod cases;
pub mod compare;
pub mod config;
pub mod run;
pub mod study;
pub mod table;

pub use cases::{Case, CaseRegistry};
pub use compare::compare;
pub use config::{GridSpec, RunConfig, SliceLine, SolverKind};
pub use run::run;
pub use study::{study, STUDIES};
pub use table::{Cell, Table};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("incompatible: {0}")]
    Incompatible(String),
    #[error("grid: {0}")]
    Grid(String),
    #[error("format: {0}")]
    Format(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Solver(#[from] fraclap::FracError),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Format(e.to_string())
    }
}

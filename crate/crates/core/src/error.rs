//! Crate-wide error types.

use crate::nlsolve::SolverError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("tableau error: {0}")]
    Tableau(String),

    #[error("domain error in system `{system}`: {detail}")]
    Domain { system: String, detail: String },

    #[error("solver error: {0}")]
    Solver(#[from] SolverError),

    /// A one-step map failed at a given step index of a trajectory.
    #[error("step {step} (t = {time}): {source}")]
    StepFailed {
        step: usize,
        time: f64,
        source: SolverError,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("diagnostics error: {0}")]
    Diagnostics(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

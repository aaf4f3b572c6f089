//! Experiment runner behind the `netdenoise` binary.
//!
//! Each subcommand is a plain function in [`commands`] taking typed inputs
//! and an output directory, so the binary stays a thin argument parser and
//! the commands can be driven from tests.

pub mod commands;
pub mod config;

use std::fmt;

pub use config::{EstimatorSpec, ExperimentConfig, GraphSpec, Grid, Rank};

/// A command failure, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments, configuration or input files (exit 2).
    Usage(String),
    /// A numerical routine failed on valid input (exit 3).
    Numeric(String),
    /// The concentration-lemma preconditions do not hold (exit 4).
    Hypothesis(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 2,
            Self::Numeric(_) => 3,
            Self::Hypothesis(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "usage error: {m}"),
            Self::Numeric(m) => write!(f, "numeric failure: {m}"),
            Self::Hypothesis(m) => write!(f, "hypothesis violated: {m}"),
        }
    }
}

impl std::error::Error for Failure {}

impl From<netdenoise::Error> for Failure {
    fn from(e: netdenoise::Error) -> Self {
        use netdenoise::Error as E;
        let msg = e.to_string();
        match e {
            E::HypothesisViolated(_) => Self::Hypothesis(msg),
            E::NoConvergence { .. }
            | E::Disconnected
            | E::NegativeEntries
            | E::NotUnitNorm(_)
            | E::ZeroVolume
            | E::IdenticalInputs
            | E::FitFailed(_)
            | E::InfeasibleRates(_) => Self::Numeric(msg),
            _ => Self::Usage(msg),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Self::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, Failure>;

use thiserror::Error;

use crate::instance::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {}", join(.0))]
    InvalidInstance(Vec<Violation>),

    #[error("invalid selection: {0}")]
    InvalidSelection(String),

    #[error("scenario index {index} out of range (K = {count})")]
    ScenarioOutOfRange { index: usize, count: usize },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded {
        what: &'static str,
        size: u128,
        cap: u128,
    },

    #[error("dynamic program refuses K = {scenarios} (limit {limit})")]
    TooManyScenarios { scenarios: usize, limit: usize },

    #[error("zero-threshold instance: L* = 0, scaling is undefined")]
    ZeroThreshold,

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {}", join(.0))]
    Parse(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn join<T: std::fmt::Display>(items: &[T]) -> String {
    items
        .iter()
        .map(|i| i.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

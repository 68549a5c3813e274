//! Error type shared across the crate.

use thiserror::Error;

/// Everything that can go wrong between reading a CSV and parsing a solution.
#[derive(Debug, Error)]
pub enum Error {
    // --- ingestion ---
    #[error("hourly gap in {path} at row {row}: expected {expected}, found {found}")]
    MissingHours {
        path: String,
        row: usize,
        expected: String,
        found: String,
    },
    #[error("bad value in {path} at row {row}: {reason}")]
    BadValue {
        path: String,
        row: usize,
        reason: String,
    },
    #[error("file {path} covers year {found}, expected {expected}")]
    WrongYear {
        path: String,
        expected: i32,
        found: i32,
    },
    #[error("series length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    // --- clustering ---
    #[error("cluster has no members")]
    EmptyCluster,
    #[error("nrd {nrd} outside [1, {days}]")]
    BadNrd { nrd: usize, days: usize },

    // --- linking / planner ---
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("big-M for candidate line {line} is {value:.3e}, beyond 1e9; tighten theta_bound_rad")]
    BigMOverflow { line: usize, value: f64 },
    #[error("investment plan out of bounds: {0}")]
    PlanOutOfBounds(String),

    // --- system instance ---
    #[error("instance schema error: {0}")]
    Schema(String),
    #[error("{kind} '{name}' references unknown bus {bus}")]
    DanglingBusRef {
        kind: &'static str,
        name: String,
        bus: usize,
    },
    #[error("load bus {bus} is not connected to any generation, even with all candidates built")]
    DisconnectedLoadBus { bus: usize },

    // --- solver I/O ---
    #[error("name '{0}' exceeds 255 characters")]
    NameTooLong(String),
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("solver exited with status {code:?} and no solution file; stderr: {stderr}")]
    SolverCrashed { code: Option<i32>, stderr: String },
    #[error("parse error in {path} line {line}: {reason}")]
    Parse {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("solver exceeded the {limit_s} s wall limit")]
    Timeout { limit_s: f64 },
    #[error("solution names unknown variable '{0}'")]
    UnknownVariable(String),

    // --- evaluation ---
    #[error("solution status {0} carries no usable values")]
    NotSolved(String),
    #[error("solution is missing variables: {0}")]
    MissingVariables(String),

    #[error("{0}")]
    Config(String),
}

impl Error {
    /// Wrap an I/O error with the path (or resource name) it concerns.
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

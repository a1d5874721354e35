use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the estimation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum StackMcError {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("insufficient data: need at least {needed} points, have {have}")]
    InsufficientData { needed: usize, have: usize },

    #[error("no closed-form expectation for {basis} under {marginal}")]
    UnsupportedIntegral { marginal: String, basis: String },

    #[error("sampling density is zero at sample {index}")]
    DegenerateWeight { index: usize },

    #[error("non-finite result in fold {fold}: {what}")]
    Numeric { fold: usize, what: String },

    #[error("no reference expectation registered for {0}")]
    NotAvailable(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {msg}")]
    Io { path: PathBuf, msg: String },
}

impl StackMcError {
    /// Process exit code used by the CLI: 2 for bad input, 3 for numeric failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            StackMcError::InsufficientData { .. }
            | StackMcError::Numeric { .. }
            | StackMcError::DegenerateWeight { .. } => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, StackMcError>;

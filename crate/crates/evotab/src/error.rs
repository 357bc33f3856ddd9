//! Crate-wide error type.

use thiserror::Error;

/// Errors produced anywhere in the pipeline, from CSV ingestion to the
/// replicator engine. Messages carry coordinates (row/column labels) where
/// they exist so a CLI user can locate the offending cell.
#[derive(Debug, Error)]
pub enum Error {
    /// The input stream could not be parsed as a rectangular table.
    #[error("parse error at data row {row}: {message}")]
    Parse { row: usize, message: String },

    /// A single cell failed to parse or violated a domain restriction.
    #[error("cell (row '{row}', column '{column}'): {message}")]
    Cell {
        row: String,
        column: String,
        message: String,
    },

    /// Header and schema disagree.
    #[error("schema mismatch: {0}")]
    Schema(String),

    /// A column cannot be normalized.
    #[error("column '{column}' is degenerate: {reason}")]
    DegenerateColumn { column: String, reason: String },

    /// Nothing analyzable remained after sanitization.
    #[error("unusable data: {0}")]
    UnusableData(String),

    /// Vector/matrix sizes do not line up.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// Gene or organism dispersion is (numerically) zero, so the
    /// altruistic/selfish payoff matrices are undefined. Callers should fall
    /// back to the dominant/balanced strategy.
    #[error("{kind} dispersion {value:.3e} is numerically zero; altruistic/selfish payoffs are undefined (fall back to dombal)")]
    DegenerateDispersion { kind: &'static str, value: f64 },

    /// Invalid run configuration or strategy mix.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The replicator step could not keep `1 + h*delta` positive even after
    /// repeatedly halving the step size.
    #[error("replicator step aborted: 1 + h*delta stayed nonpositive after {halvings} step-size halvings (strategy produced out-of-range deltas)")]
    StepSize { halvings: u32 },

    /// An operation that requires a converged rest point received an
    /// unconverged one.
    #[error("dynamics did not converge after {iterations} iterations: {detail}")]
    Unconverged { iterations: usize, detail: String },

    /// Grid-search fitting could not produce a result.
    #[error("mix fit failed: {0}")]
    Fit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::switching::Switch;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("row {row} has {found} ones, expected {expected}")]
    RowDegree { row: usize, found: usize, expected: usize },

    #[error("column {col} has {found} ones, expected {expected}")]
    ColDegree { col: usize, found: usize, expected: usize },

    #[error("index {index} out of range for n = {n}")]
    Index { index: usize, n: usize },

    #[error("row {row} repeats column index {index}")]
    DuplicateIndex { row: usize, index: usize },

    #[error("parse error at line {line}, position {pos}: {msg}")]
    Parse { line: usize, pos: usize, msg: String },

    #[error("switching {0} cannot be performed")]
    InfeasibleSwitch(Switch),

    #[error("no performable switching found after {attempts} attempts")]
    NoSwitch { attempts: u64 },

    #[error("switch count {total} outside [{lower}, {upper}]")]
    BoundViolation { total: u64, lower: i128, upper: i128 },

    #[error("stub matching rejected {attempts} times in a row")]
    RejectionBudgetExceeded { attempts: u64 },

    #[error("size guard refused n = {n}, d = {d}")]
    SizeGuard { n: usize, d: usize },

    #[error("vector has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not singular")]
    NotSingular,

    #[error("witness construction failed: {0}")]
    WitnessConstruction(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("inequality chain violated: {0}")]
    ChainViolation(String),
}

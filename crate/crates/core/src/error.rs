use thiserror::Error;

/// Errors raised by constructors and operations in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value {value} at {location}")]
    NonFinite { value: f64, location: String },

    #[error("invalid state space: {0}")]
    Space(String),

    #[error("invalid probability vector: {0}")]
    Simplex(String),

    #[error("invalid utility function: {0}")]
    Utility(String),

    #[error("invalid dataset: {0}")]
    Dataset(String),

    #[error("axis {0} is not present in this dataset")]
    AxisAbsent(String),

    #[error("fixed value {0} is out of range for the axis")]
    FixedValue(String),

    #[error("row {0} of the belief has zero mass")]
    ZeroRowMass(usize),

    #[error("degenerate utility domain: {0}")]
    DegenerateDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

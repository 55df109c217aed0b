use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix contains a non-finite entry")]
    NonFinite,

    #[error("invalid matrix dimension: {0}")]
    InvalidDimension(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimMismatch { left: usize, right: usize },

    #[error("symmetric eigensolver did not converge (dim {dim})")]
    ConvergenceFailure { dim: usize },

    #[error("negative power {alpha} of a matrix that is not positive definite (min eigenvalue {min_eigenvalue:e}, tolerance {tolerance:e})")]
    NegativePowerOfSingular {
        alpha: f64,
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error(
        "fractional power {alpha} of an indefinite matrix (min eigenvalue {min_eigenvalue:e}, tolerance {tolerance:e})"
    )]
    FractionalPowerOfIndefinite {
        alpha: f64,
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("coefficient matrix is not positive definite (min eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("right-hand side B is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    BNotPsd { min_eigenvalue: f64 },

    #[error("eigenbasis denominator {value:e} is too small")]
    SingularDenominator { value: f64 },

    #[error("stacked system of dim {dim} exceeds the oracle limit {max}")]
    DimTooLarge { dim: usize, max: usize },

    #[error("stacked system is numerically singular (condition estimate {condition:e})")]
    NumericallySingular { condition: f64 },

    #[error("degenerate exponent denominator {value}")]
    DegenerateExponent { value: f64 },

    #[error("eigenvalue {value} at index {index} is not positive")]
    NonPositiveEigenvalue { index: usize, value: f64 },

    #[error("r-condition does not hold: r = {r}, required {required_r}")]
    RConditionInvalid { r: f64, required_r: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the operator, solver and thermodynamics routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian: max |A - A^H| = {residual:e} (allowed {allowed:e})")]
    NotHermitian { residual: f64, allowed: f64 },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("leading coefficient of a cubic is zero")]
    Degree,

    #[error("quadrature did not converge after {intervals} subintervals (best estimate {estimate}, error {error:e})")]
    Quadrature {
        estimate: f64,
        error: f64,
        intervals: usize,
    },

    #[error("basis {basis} does not provide {what}")]
    UnsupportedBasis { basis: String, what: &'static str },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("mass {mass} exceeds the Nariai bound {nariai}; no horizons exist")]
    NoHorizon { mass: f64, nariai: f64 },

    #[error("expected {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("Pauli coefficient for {label} has imaginary part {imag:e}")]
    ComplexCoefficient { label: String, imag: f64 },

    #[error("invalid optimizer settings: {0}")]
    Settings(String),

    #[error("optimizer aborted after {iterations} iterations: non-finite gradient")]
    NonFiniteGradient { x: Vec<f64>, value: f64, iterations: usize },

    #[error("all {0} VQE starts failed")]
    AllStartsFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

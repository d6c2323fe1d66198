//! Quantum operators of Schwarzschild-de Sitter / Kantowski-Sachs
//! minisuperspace on qubit registers.
//!
//! The crate builds the Hamiltonian constraint `2bH` and mass operator `4M` in
//! truncated oscillator (and related) bases, expands them in Pauli strings,
//! solves their constrained spectra exactly and with a gate-level variational
//! eigensolver, and evaluates the classical horizon thermodynamics.

pub mod ansatz;
pub mod basis;
pub mod error;
pub mod model;
pub mod numerics;
pub mod pauli;
pub mod spectrum;
pub mod thermo;
pub mod vqe;
pub mod wavefn;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{ComplexMatrix, EigenDecomposition, HermitianOperator, OptimizerSettings};

/// Float formatting for CSV output: shortest exponent form that parses back
/// to the same bits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:e}")
}

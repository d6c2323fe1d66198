//! Ry / CX variational form simulated on a real statevector.
//!
//! Layout: `[Ry layer; entangling block] × depth`, then a closing Ry layer,
//! applied to `|0…0>`. Parameter `l·q + i` drives the Ry on qubit `i` in layer
//! `l`. Qubit 0 is the most significant bit of the amplitude index.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::HermitianOperator;
use crate::pauli::PauliSum;

/// Per-angle box used by the optimizer.
pub const PARAMETER_BOUND: f64 = 2.0 * PI;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Entanglement {
    /// CX(i→j) for every i < j.
    #[default]
    Full,
    /// CX(i→i+1).
    Linear,
}

impl fmt::Display for Entanglement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Entanglement::Full => "full",
            Entanglement::Linear => "linear",
        })
    }
}

impl FromStr for Entanglement {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Entanglement::Full),
            "linear" => Ok(Entanglement::Linear),
            other => Err(Error::Settings(format!("unknown entanglement '{other}' (expected full or linear)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnsatzSpec {
    pub qubits: usize,
    pub depth: usize,
    #[serde(default)]
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn new(qubits: usize, depth: usize, entanglement: Entanglement) -> Self {
        Self {
            qubits,
            depth,
            entanglement,
        }
    }

    /// Fully entangled, depth 3.
    pub fn reference(qubits: usize) -> Self {
        Self::new(qubits, 3, Entanglement::Full)
    }

    pub fn validate(&self) -> Result<()> {
        if self.qubits == 0 || self.qubits > 24 {
            return Err(Error::Settings(format!("ansatz qubit count {} outside 1..=24", self.qubits)));
        }
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.qubits * (self.depth + 1)
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }

    /// Control/target pairs of one entangling block, in application order.
    pub fn cx_pairs(&self) -> Vec<(usize, usize)> {
        let q = self.qubits;
        match self.entanglement {
            Entanglement::Full => (0..q).flat_map(|i| (i + 1..q).map(move |j| (i, j))).collect(),
            Entanglement::Linear => (0..q.saturating_sub(1)).map(|i| (i, i + 1)).collect(),
        }
    }

    pub fn cx_count(&self) -> usize {
        self.depth * self.cx_pairs().len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzState {
    pub parameters: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl AnsatzState {
    /// Real amplitudes; Ry and CX never introduce a phase.
    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn to_complex(&self) -> Vec<Complex64> {
        self.amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

fn apply_ry(psi: &mut [f64], qubits: usize, qubit: usize, theta: f64) {
    let bit = 1usize << (qubits - 1 - qubit);
    let (s, c) = (0.5 * theta).sin_cos();
    for k in 0..psi.len() {
        if k & bit == 0 {
            let (a0, a1) = (psi[k], psi[k | bit]);
            psi[k] = c * a0 - s * a1;
            psi[k | bit] = s * a0 + c * a1;
        }
    }
}

fn apply_cx(psi: &mut [f64], qubits: usize, control: usize, target: usize) {
    let cb = 1usize << (qubits - 1 - control);
    let tb = 1usize << (qubits - 1 - target);
    for k in 0..psi.len() {
        if k & cb != 0 && k & tb == 0 {
            psi.swap(k, k | tb);
        }
    }
}

fn check_arity(spec: &AnsatzSpec, theta: &[f64]) -> Result<()> {
    spec.validate()?;
    if theta.len() != spec.parameter_count() {
        return Err(Error::Arity {
            expected: spec.parameter_count(),
            got: theta.len(),
        });
    }
    Ok(())
}

fn run_circuit(spec: &AnsatzSpec, pairs: &[(usize, usize)], theta: &[f64]) -> Vec<f64> {
    let q = spec.qubits;
    let mut psi = vec![0.0; spec.dim()];
    psi[0] = 1.0;
    for layer in 0..=spec.depth {
        for i in 0..q {
            apply_ry(&mut psi, q, i, theta[layer * q + i]);
        }
        if layer < spec.depth {
            for &(c, t) in pairs {
                apply_cx(&mut psi, q, c, t);
            }
        }
    }
    psi
}

pub fn prepare(spec: &AnsatzSpec, theta: &[f64]) -> Result<AnsatzState> {
    check_arity(spec, theta)?;
    let amplitudes = run_circuit(spec, &spec.cx_pairs(), theta);
    Ok(AnsatzState {
        parameters: theta.to_vec(),
        amplitudes,
    })
}

/// An operator whose expectation can be taken in a real state.
pub trait Observable: Sync {
    fn dim(&self) -> usize;

    /// `<psi|O|psi>` for real, normalized `psi` of length `dim()`.
    fn expectation_real(&self, psi: &[f64]) -> f64;
}

impl Observable for HermitianOperator {
    fn dim(&self) -> usize {
        HermitianOperator::dim(self)
    }

    // The imaginary part of a Hermitian matrix is antisymmetric and drops out.
    fn expectation_real(&self, psi: &[f64]) -> f64 {
        let n = psi.len();
        let data = self.as_slice();
        let mut total = 0.0;
        for (j, &pj) in psi.iter().enumerate() {
            let row = &data[j * n..(j + 1) * n];
            let hv: f64 = row.iter().zip(psi).map(|(h, &p)| h.re * p).sum();
            total += pj * hv;
        }
        total
    }
}

impl Observable for PauliSum {
    fn dim(&self) -> usize {
        1 << self.qubits()
    }

    fn expectation_real(&self, psi: &[f64]) -> f64 {
        self.terms()
            .iter()
            .filter(|t| t.string.y_count() % 2 == 0)
            .map(|t| {
                let (x, z) = (t.string.x_mask(), t.string.z_mask());
                let sign = if t.string.y_count() % 4 == 0 { 1.0 } else { -1.0 };
                let s: f64 = psi
                    .iter()
                    .enumerate()
                    .map(|(k, &a)| {
                        let parity = if (k & z).count_ones() % 2 == 0 { a } else { -a };
                        psi[k ^ x] * parity
                    })
                    .sum();
                t.coefficient * sign * s
            })
            .sum()
    }
}

fn check_dim(spec: &AnsatzSpec, op: &dyn Observable) -> Result<()> {
    if op.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match {} qubits",
            op.dim(),
            spec.qubits
        )));
    }
    Ok(())
}

pub fn expectation_of(spec: &AnsatzSpec, theta: &[f64], op: &dyn Observable) -> Result<f64> {
    check_arity(spec, theta)?;
    check_dim(spec, op)?;
    Ok(op.expectation_real(&run_circuit(spec, &spec.cx_pairs(), theta)))
}

/// Parameter-shift gradient, `½[<O>(θ_k + π/2) − <O>(θ_k − π/2)]` per angle.
pub fn gradient(spec: &AnsatzSpec, theta: &[f64], op: &dyn Observable) -> Result<Vec<f64>> {
    check_arity(spec, theta)?;
    check_dim(spec, op)?;
    let pairs = spec.cx_pairs();
    let mut shifted = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for k in 0..theta.len() {
        shifted[k] = theta[k] + FRAC_PI_2;
        let plus = op.expectation_real(&run_circuit(spec, &pairs, &shifted));
        shifted[k] = theta[k] - FRAC_PI_2;
        let minus = op.expectation_real(&run_circuit(spec, &pairs, &shifted));
        shifted[k] = theta[k];
        grad.push(0.5 * (plus - minus));
    }
    Ok(grad)
}

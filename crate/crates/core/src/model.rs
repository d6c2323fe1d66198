//! Hamiltonian-constraint and mass operators in the `u, v` representation,
//! and the classical `a, b` mass function and potentials.
//!
//! Units are `G = c = ħ = 1`. With `u = b^{1/2}(a+1)`, `v = b^{1/2}(a−1)`:
//!
//! ```text
//! 2bH = ½(p_u² − p_v²) + ½(u² − v²) − (λ/32)(u² − v²)(u − v)⁴
//! 4M  = ½(p_u + p_v)² + ½(u − v)² − (λ/96)(u − v)⁶
//! ```

use serde::{Deserialize, Serialize};

use crate::basis::{make_pair, BasisKind};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, HermitianOperator};

pub const SUPPORTED_QUBITS: [usize; 5] = [2, 4, 6, 8, 10];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub lambda: f64,
    pub qubits: usize,
    #[serde(default)]
    pub basis: BasisKind,
}

impl ModelConfig {
    pub fn new(lambda: f64, qubits: usize, basis: BasisKind) -> Self {
        Self { lambda, qubits, basis }
    }

    /// Oscillator basis with the cosmological constant used for that register
    /// size in the reference runs: `0.005` at 8 qubits, `0.01` otherwise.
    pub fn reference(qubits: usize) -> Self {
        Self::new(default_lambda(qubits), qubits, BasisKind::Oscillator)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return Err(Error::Domain(format!("lambda must be finite and >= 0, got {}", self.lambda)));
        }
        if !SUPPORTED_QUBITS.contains(&self.qubits) {
            return Err(Error::Dimension(format!(
                "qubit count must be one of {SUPPORTED_QUBITS:?}, got {}",
                self.qubits
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }
}

pub fn default_lambda(qubits: usize) -> f64 {
    if qubits == 8 {
        0.005
    } else {
        0.01
    }
}

/// The constraint `2bH` and mass `4M` for one configuration.
#[derive(Clone, Debug)]
pub struct OperatorPair {
    pub hamiltonian_2bh: HermitianOperator,
    pub mass_4m: HermitianOperator,
    pub config: ModelConfig,
}

impl OperatorPair {
    /// `max |[2bH, 4M]|`. Vanishes in the continuum but not at finite truncation.
    pub fn commutator_norm(&self) -> f64 {
        self.hamiltonian_2bh.commutator(&self.mass_4m).max_abs()
    }

    /// [`Self::commutator_norm`] divided by `max|2bH| · max|4M|`.
    pub fn relative_commutator_norm(&self) -> f64 {
        self.commutator_norm() / (self.hamiltonian_2bh.max_abs() * self.mass_4m.max_abs())
    }
}

pub fn build_operators(config: &ModelConfig) -> Result<OperatorPair> {
    config.validate()?;
    if !config.basis.has_momentum() {
        return Err(Error::UnsupportedBasis {
            basis: config.basis.name().into(),
            what: "the cross term p_u p_v of the mass operator",
        });
    }
    let pair = make_pair(config.qubits, config.basis)?;
    let (Some(p_u), Some(p_v)) = (&pair.p_u, &pair.p_v) else {
        unreachable!("momentum-capable basis")
    };
    let lambda = config.lambda;

    let u2 = pair.u.matmul(&pair.u);
    let v2 = pair.v.matmul(&pair.v);
    let u2_minus_v2 = &u2 - &v2;
    let diff = &*pair.u - &*pair.v;
    let diff2 = diff.matmul(&diff);
    let diff4 = diff2.matmul(&diff2);
    let diff6 = diff4.matmul(&diff2);

    let kinetic_h = (&*pair.p2_u - &*pair.p2_v).scale_real(0.5);
    let quartic = u2_minus_v2.matmul(&diff4).scale_real(lambda / 32.0);
    let hamiltonian = &(&kinetic_h + &u2_minus_v2.scale_real(0.5)) - &quartic;

    let cross = &p_u.matmul(p_v) + &p_v.matmul(p_u);
    let momentum_sq = &(&*pair.p2_u + &*pair.p2_v) + &cross;
    let mass = &(&momentum_sq.scale_real(0.5) + &diff2.scale_real(0.5)) - &diff6.scale_real(lambda / 96.0);

    Ok(OperatorPair {
        hamiltonian_2bh: HermitianOperator::new(hamiltonian)?,
        mass_4m: HermitianOperator::new(mass)?,
        config: *config,
    })
}

/// Swaps the two tensor slots: `|m, n> -> |n, m>`.
pub fn swap_slots(op: &ComplexMatrix, levels: usize) -> ComplexMatrix {
    let idx = |k: usize| (k % levels) * levels + k / levels;
    ComplexMatrix::from_fn(op.rows(), op.cols(), |r, c| op[(idx(r), idx(c))])
}

/// Classical mass in the `a, b` representation,
/// `M = p_a²/(2b) + b/2 − λb³/6`.
pub fn mass_ab(p_a: f64, b: f64, lambda: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    Ok(p_a * p_a / (2.0 * b) + b / 2.0 - lambda * b.powi(3) / 6.0)
}

/// Classical `4M` in the `u, v` representation as a function of
/// `P = p_u + p_v` and `x = u − v`.
pub fn mass_uv(p_sum: f64, x: f64, lambda: f64) -> f64 {
    0.5 * p_sum * p_sum + potential_sd(x, lambda)
}

/// Schwarzschild potential `x²/2` with `x = u − v`.
pub fn potential_s(x: f64) -> f64 {
    0.5 * x * x
}

/// Schwarzschild-de Sitter potential `x²/2 − (λ/96)x⁶`.
pub fn potential_sd(x: f64, lambda: f64) -> f64 {
    0.5 * x * x - lambda / 96.0 * x.powi(6)
}

/// Location `x* = (16/λ)^{1/4}` of the maximum of [`potential_sd`] on `x > 0`.
pub fn potential_sd_peak(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok((16.0 / lambda).powf(0.25))
}

/// Nariai mass `1/(3√λ)`, the largest black-hole mass with a horizon.
pub fn nariai_mass(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    Ok(1.0 / (3.0 * lambda.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::eig_hermitian;

    #[test]
    fn config_validation() {
        assert!(ModelConfig::reference(4).validate().is_ok());
        assert!(ModelConfig::new(-1.0, 4, BasisKind::Oscillator).validate().is_err());
        assert!(ModelConfig::new(0.01, 12, BasisKind::Oscillator).validate().is_err());
        assert!(ModelConfig::new(0.01, 3, BasisKind::Oscillator).validate().is_err());
        assert_eq!(ModelConfig::reference(8).lambda, 0.005);
        assert_eq!(ModelConfig::reference(6).lambda, 0.01);
    }

    #[test]
    fn finite_difference_is_unsupported() {
        let cfg = ModelConfig::new(0.01, 4, BasisKind::FiniteDifference);
        assert!(matches!(build_operators(&cfg), Err(Error::UnsupportedBasis { .. })));
    }

    #[test]
    fn operators_are_hermitian() {
        for q in [2, 4, 6] {
            for lambda in [0.0, 0.005, 0.01, 3.0] {
                for basis in [BasisKind::Oscillator, BasisKind::Position, BasisKind::Ladder] {
                    let ops = build_operators(&ModelConfig::new(lambda, q, basis)).unwrap();
                    assert_eq!(ops.mass_4m.dim(), 1 << q);
                    assert!(ops.mass_4m.hermiticity_residual() < 1e-12);
                    assert!(ops.hamiltonian_2bh.hermiticity_residual() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn raw_products_are_hermitian_before_symmetrization() {
        // the guard in HermitianOperator::new would mask an ordering bug, so
        // re-assemble the raw quartic term and check it directly
        let pair = make_pair(6, BasisKind::Oscillator).unwrap();
        let u2v2 = &pair.u.matmul(&pair.u) - &pair.v.matmul(&pair.v);
        let d = &*pair.u - &*pair.v;
        let d4 = d.powi(4);
        let t = u2v2.matmul(&d4);
        assert!(t.hermiticity_residual() < 1e-12 * t.max_abs().max(1.0));
    }

    #[test]
    fn mass_is_positive_semidefinite_without_lambda() {
        let ops = build_operators(&ModelConfig::new(0.0, 4, BasisKind::Oscillator)).unwrap();
        let w = eig_hermitian(ops.mass_4m.matrix()).unwrap().eigenvalues;
        assert!(w[0] > -1e-12);
    }

    #[test]
    fn mass_spectrum_is_monotone_in_lambda() {
        let spectra: Vec<Vec<f64>> = [0.0, 0.005, 0.01]
            .iter()
            .map(|&l| {
                let ops = build_operators(&ModelConfig::new(l, 4, BasisKind::Oscillator)).unwrap();
                eig_hermitian(ops.mass_4m.matrix()).unwrap().eigenvalues
            })
            .collect();
        for w in spectra.windows(2) {
            for (a, b) in w[0].iter().zip(&w[1]) {
                assert!(b <= &(a + 1e-12));
            }
        }
    }

    #[test]
    fn mass_operator_is_slot_swap_symmetric() {
        for q in [4, 6] {
            let ops = build_operators(&ModelConfig::reference(q)).unwrap();
            let levels = 1 << (q / 2);
            let swapped = swap_slots(ops.mass_4m.matrix(), levels);
            assert!(swapped.max_abs_diff(ops.mass_4m.matrix()) < 1e-12);
        }
    }

    #[test]
    fn swap_slots_exchanges_u_and_v() {
        let pair = make_pair(4, BasisKind::Oscillator).unwrap();
        assert_eq!(swap_slots(pair.u.matrix(), 4), *pair.v.matrix());
    }

    #[test]
    fn commutator_diagnostic_shrinks_relative_to_operator_scale() {
        let c4 = build_operators(&ModelConfig::new(0.01, 4, BasisKind::Oscillator)).unwrap();
        let c6 = build_operators(&ModelConfig::new(0.01, 6, BasisKind::Oscillator)).unwrap();
        // the absolute norm grows with the operator entries; the scaled one falls
        assert!(c4.commutator_norm() > 0.0);
        assert!(c6.relative_commutator_norm() < c4.relative_commutator_norm());
    }

    #[test]
    fn classical_mass_function() {
        let lambda: f64 = 0.01;
        let m = mass_ab(0.0, 1.0 / lambda.sqrt(), lambda).unwrap();
        assert!((m - 1.0 / (3.0 * lambda.sqrt())).abs() < 1e-12);
        assert_eq!(mass_ab(0.0, 1.0, 0.0).unwrap(), 0.5);
        assert!((mass_ab(0.0, 1.00337, 0.01).unwrap() - 0.5).abs() < 1e-3);
        assert!(mass_ab(1.0, 0.0, 0.01).is_err());
        assert!(mass_ab(1.0, -2.0, 0.01).is_err());
    }

    #[test]
    fn potentials() {
        assert_eq!(potential_s(2.0), 2.0);
        for x in [-3.0, -0.5, 0.0, 1.7, 10.0] {
            assert_eq!(potential_sd(x, 0.0), potential_s(x));
        }
        let x = potential_sd_peak(0.01).unwrap();
        let peak = potential_sd(x, 0.01);
        assert!((peak - (16.0f64 / 0.01).sqrt() / 3.0).abs() < 1e-12);
        assert!((peak - 13.333).abs() < 1e-3);
        assert!(potential_sd(x * 1.01, 0.01) < peak && potential_sd(x * 0.99, 0.01) < peak);
    }

    #[test]
    fn nariai() {
        assert!((nariai_mass(3.0).unwrap() - 1.0 / 27f64.sqrt()).abs() < 1e-15);
        assert!((nariai_mass(0.01).unwrap() - 3.3333).abs() < 1e-3);
        assert!((nariai_mass(1.0 / 3.0).unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(nariai_mass(0.0).is_err());
    }
}

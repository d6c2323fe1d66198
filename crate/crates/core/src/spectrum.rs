//! Eigenpairs of `4M` restricted to states annihilated by `2bH`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::OperatorPair;
use crate::numerics::{eig_hermitian, fix_phases, norm, ComplexMatrix, EigenDecomposition, HermitianOperator};

/// Relative spacing below which two `4M` eigenvalues share a block.
const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Diagonalize `4M`, keep eigenvectors with small constraint residual.
    #[default]
    Filter,
    /// Diagonalize `4M` inside the numerical null space of `2bH`.
    Project,
}

impl Method {
    /// Filter thresholds the relative residual `‖2bH ψ‖ / ‖2bH‖_max`; project
    /// thresholds `|eigenvalue of 2bH| / max |eigenvalue|`.
    pub fn default_tol(self) -> f64 {
        match self {
            Method::Filter => 0.05,
            Method::Project => 1e-6,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Filter => "filter",
            Method::Project => "project",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "filter" => Ok(Method::Filter),
            "project" => Ok(Method::Project),
            other => Err(Error::Settings(format!("unknown spectrum method '{other}' (expected filter or project)"))),
        }
    }
}

/// One state considered for retention. For the filter method `value` is the
/// `4M` eigenvalue; for project it is the `2bH` eigenvalue and `residual` its
/// magnitude relative to the largest.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Candidate {
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstrainedSpectrum {
    pub method: Method,
    pub tol: f64,
    pub eigenvalues: Vec<f64>,
    /// `‖2bH ψ‖ / ‖2bH‖_max` for each retained state.
    pub residuals: Vec<f64>,
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<Complex64>>,
    /// Every candidate, smallest residual first.
    pub candidates: Vec<Candidate>,
}

impl ConstrainedSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Ratio of the first rejected candidate residual to the largest retained
    /// one.
    pub fn separation_factor(&self) -> Option<f64> {
        let k = self.len();
        if k == 0 || k >= self.candidates.len() {
            return None;
        }
        Some(self.candidates[k].residual / self.candidates[k - 1].residual)
    }

    /// `max |G − I|` for the Gram matrix of the retained vectors.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for (i, a) in self.eigenvectors.iter().enumerate() {
            for (j, b) in self.eigenvectors.iter().enumerate() {
                let g: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }

    /// Rows `(state, basis_index, real, imag)`.
    pub fn write_eigenvectors_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "state,basis_index,real,imag")?;
        for (s, v) in self.eigenvectors.iter().enumerate() {
            for (k, z) in v.iter().enumerate() {
                writeln!(w, "{s},{k},{},{}", crate::fmt_f64(z.re), crate::fmt_f64(z.im))?;
            }
        }
        Ok(())
    }
}

pub fn full_spectrum(op: &HermitianOperator) -> Result<EigenDecomposition> {
    eig_hermitian(op.matrix())
}

fn relative_residual(h: &HermitianOperator, h_max: f64, psi: &[Complex64]) -> f64 {
    if h_max == 0.0 {
        return 0.0;
    }
    norm(&h.matvec(psi)) / h_max
}

/// Columns of `basis · w`, phase-normalized.
fn rotate_block(basis: &ComplexMatrix, w: &ComplexMatrix) -> ComplexMatrix {
    let mut v = basis.matmul(w);
    fix_phases(&mut v);
    v
}

fn filter(pair: &OperatorPair, tol: f64) -> Result<ConstrainedSpectrum> {
    let h = &pair.hamiltonian_2bh;
    let h_max = h.max_abs();
    let eig = full_spectrum(&pair.mass_4m)?;
    let scale = eig.eigenvalues.iter().fold(1.0f64, |m, e| m.max(e.abs()));

    // Inside a degenerate block pick the basis that diagonalizes the
    // restricted (2bH)², so residual minimizers are found independently of
    // the solver's arbitrary block basis.
    let h2 = h.matmul(h);
    let mut states: Vec<(f64, Vec<Complex64>)> = Vec::with_capacity(eig.len());
    let mut start = 0;
    while start < eig.len() {
        let mut end = start + 1;
        while end < eig.len() && eig.eigenvalues[end] - eig.eigenvalues[end - 1] <= DEGENERACY_TOL * scale {
            end += 1;
        }
        let cols: Vec<usize> = (start..end).collect();
        let block = eig.eigenvectors.select_columns(&cols);
        let vectors = if cols.len() > 1 {
            let restricted = block.adjoint().matmul(&h2).matmul(&block);
            let sub = eig_hermitian(&HermitianOperator::new(restricted)?.into_matrix())?;
            rotate_block(&block, &sub.eigenvectors)
        } else {
            block
        };
        for (offset, &k) in cols.iter().enumerate() {
            states.push((eig.eigenvalues[k], vectors.column(offset)));
        }
        start = end;
    }

    let mut scored: Vec<(f64, f64, Vec<Complex64>)> = states
        .into_iter()
        .map(|(e, v)| (e, relative_residual(h, h_max, &v), v))
        .collect();
    let mut candidates: Vec<Candidate> = scored
        .iter()
        .map(|(e, r, _)| Candidate { value: *e, residual: *r })
        .collect();
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));

    scored.retain(|(_, r, _)| *r < tol);
    Ok(ConstrainedSpectrum {
        method: Method::Filter,
        tol,
        eigenvalues: scored.iter().map(|s| s.0).collect(),
        residuals: scored.iter().map(|s| s.1).collect(),
        eigenvectors: scored.into_iter().map(|s| s.2).collect(),
        candidates,
    })
}

fn project(pair: &OperatorPair, tol: f64) -> Result<ConstrainedSpectrum> {
    let h = &pair.hamiltonian_2bh;
    let h_max = h.max_abs();
    let heig = full_spectrum(h)?;
    let largest = heig.eigenvalues.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let rel = |e: f64| if largest == 0.0 { 0.0 } else { e.abs() / largest };

    let mut candidates: Vec<Candidate> = heig
        .eigenvalues
        .iter()
        .map(|&e| Candidate {
            value: e,
            residual: rel(e),
        })
        .collect();
    candidates.sort_by(|a, b| a.residual.total_cmp(&b.residual));

    let null_cols: Vec<usize> = (0..heig.len()).filter(|&k| rel(heig.eigenvalues[k]) < tol).collect();
    if null_cols.is_empty() {
        return Ok(ConstrainedSpectrum {
            method: Method::Project,
            tol,
            eigenvalues: vec![],
            residuals: vec![],
            eigenvectors: vec![],
            candidates,
        });
    }
    let basis = heig.eigenvectors.select_columns(&null_cols);
    let projected = basis.adjoint().matmul(pair.mass_4m.matrix()).matmul(&basis);
    let sub = eig_hermitian(&HermitianOperator::new(projected)?.into_matrix())?;
    let vectors = rotate_block(&basis, &sub.eigenvectors);
    let eigenvectors: Vec<Vec<Complex64>> = (0..vectors.cols()).map(|c| vectors.column(c)).collect();
    Ok(ConstrainedSpectrum {
        method: Method::Project,
        tol,
        residuals: eigenvectors.iter().map(|v| relative_residual(h, h_max, v)).collect(),
        eigenvalues: sub.eigenvalues,
        eigenvectors,
        candidates,
    })
}

/// Mass eigenstates satisfying the constraint. An empty result is returned
/// as a spectrum with no retained states; `candidates` then shows how close
/// each state came.
pub fn constrained_spectrum(pair: &OperatorPair, method: Method, tol: f64) -> Result<ConstrainedSpectrum> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::Settings(format!("spectrum tolerance must be positive, got {tol}")));
    }
    match method {
        Method::Filter => filter(pair, tol),
        Method::Project => project(pair, tol),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisKind;
    use crate::model::{build_operators, ModelConfig};

    fn reference_pair() -> OperatorPair {
        build_operators(&ModelConfig::reference(4)).unwrap()
    }

    #[test]
    fn filter_reproduces_four_states() {
        let s = constrained_spectrum(&reference_pair(), Method::Filter, Method::Filter.default_tol()).unwrap();
        let expected = [0.0, 0.935639, 3.29768, 7.67034];
        assert_eq!(s.len(), 4);
        for (e, x) in s.eigenvalues.iter().zip(expected) {
            assert!((e - x).abs() < 1e-3, "{e} vs {x}");
        }
        assert!(s.separation_factor().unwrap() >= 10.0);
        assert!(s.orthonormality_error() < 1e-8);
        assert!(s.residuals.iter().all(|&r| r < s.tol));
    }

    #[test]
    fn tight_filter_keeps_exact_null_state_only() {
        let s = constrained_spectrum(&reference_pair(), Method::Filter, 1e-6).unwrap();
        assert_eq!(s.len(), 1);
        assert!(s.eigenvalues[0].abs() < 1e-6);
    }

    #[test]
    fn project_shares_ground_state() {
        let pair = reference_pair();
        let p = constrained_spectrum(&pair, Method::Project, 1e-6).unwrap();
        let f = constrained_spectrum(&pair, Method::Filter, 0.05).unwrap();
        assert!(!p.is_empty());
        assert!((p.eigenvalues[0] - f.eigenvalues[0]).abs() < 1e-6);
        assert!(p.orthonormality_error() < 1e-8);
        assert!(p.residuals.iter().all(|&r| r < 1e-6));
    }

    #[test]
    fn empty_result_is_a_report() {
        let s = constrained_spectrum(&reference_pair(), Method::Filter, 1e-30).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.candidates.len(), 16);
        assert!(s.candidates.windows(2).all(|w| w[0].residual <= w[1].residual));
        assert!(constrained_spectrum(&reference_pair(), Method::Filter, 0.0).is_err());
    }

    #[test]
    fn zero_lambda_spectrum_is_nonnegative() {
        let pair = build_operators(&ModelConfig::new(0.0, 4, BasisKind::Oscillator)).unwrap();
        let s = constrained_spectrum(&pair, Method::Filter, 0.05).unwrap();
        assert!(s.eigenvalues.iter().all(|&e| e > -1e-10));
    }

    #[test]
    fn full_spectrum_basics() {
        let pair = reference_pair();
        let eig = full_spectrum(&pair.mass_4m).unwrap();
        assert_eq!(eig.len(), 16);
        assert!(eig.eigenvalues[0].abs() < 1e-6);
        let id = full_spectrum(&HermitianOperator::identity(4)).unwrap();
        assert!(id.eigenvalues.iter().all(|&e| e == 1.0));
    }

    #[test]
    fn eigenvector_csv_rows() {
        let s = constrained_spectrum(&reference_pair(), Method::Filter, 0.05).unwrap();
        let mut buf = Vec::new();
        s.write_eigenvectors_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 4 * 16);
        assert!(text.starts_with("state,basis_index,real,imag\n0,0,"));
    }
}

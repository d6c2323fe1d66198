//! Hermitian eigendecomposition by cyclic complex Jacobi rotations.

use num_complex::Complex64;

use super::matrix::{ComplexMatrix, HermitianOperator};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in ascending order with the matching orthonormal eigenvectors
/// stored as columns.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.eigenvectors.column(k)
    }

    /// `max |A - V diag(w) V^H|`.
    pub fn reconstruction_error(&self, a: &ComplexMatrix) -> f64 {
        let v = &self.eigenvectors;
        let n = v.rows();
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in 0..n {
                let z: Complex64 = (0..self.len())
                    .map(|k| v[(r, k)] * self.eigenvalues[k] * v[(c, k)].conj())
                    .sum();
                worst = worst.max((z - a[(r, c)]).norm());
            }
        }
        worst
    }

    /// `max |V^H V - I|`.
    pub fn orthonormality_error(&self) -> f64 {
        let v = &self.eigenvectors;
        let gram = v.adjoint().matmul(v);
        gram.max_abs_diff(&ComplexMatrix::identity(gram.rows()))
    }
}

/// Diagonalizes a Hermitian matrix.
///
/// Eigenvalues come back ascending (stable with respect to the rotation order
/// for exact ties) and each eigenvector's first component of modulus above
/// `1e-10` is rotated to be real and positive.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let residual = a.hermiticity_residual();
    let allowed = HermitianOperator::TOLERANCE * a.max_abs().max(1.0);
    if residual > allowed {
        return Err(Error::NotHermitian { residual, allowed });
    }

    let n = a.rows();
    let mut w = ComplexMatrix::from_fn(n, n, |r, c| 0.5 * (a[(r, c)] + a[(c, r)].conj()));
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    if n > 1 && scale > 0.0 {
        for _ in 0..MAX_SWEEPS {
            if off_diagonal_norm(&w) <= 1e-15 * scale {
                break;
            }
            for p in 0..n - 1 {
                for q in p + 1..n {
                    rotate(&mut w, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(i, i)].re.total_cmp(&w[(j, j)].re));
    let eigenvalues = order.iter().map(|&i| w[(i, i)].re).collect();
    let mut eigenvectors = v.select_columns(&order);
    fix_phases(&mut eigenvectors);

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

impl HermitianOperator {
    pub fn eigen(&self) -> EigenDecomposition {
        eig_hermitian(self.matrix()).expect("Hermitian by construction")
    }
}

fn off_diagonal_norm(w: &ComplexMatrix) -> f64 {
    let n = w.rows();
    let mut s = 0.0;
    for p in 0..n {
        for q in p + 1..n {
            s += w[(p, q)].norm_sqr();
        }
    }
    (2.0 * s).sqrt()
}

/// Annihilates `w[p][q]` with the unitary `G = diag(1, e^{-i phi}) R(c, s)`
/// acting on the (p, q) plane, then accumulates `V <- V G`.
fn rotate(w: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = w[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    if r < 1e-300 || r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        w[(p, q)] = Complex64::new(0.0, 0.0);
        w[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase = apq / r;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta >= 0.0 {
        1.0 / (theta + (theta * theta + 1.0).sqrt())
    } else {
        -1.0 / (-theta + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let conj_phase = phase.conj();

    let n = w.rows();
    for k in 0..n {
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        w[(k, p)] = c * akp - s * conj_phase * akq;
        w[(k, q)] = s * akp + c * conj_phase * akq;
    }
    for k in 0..n {
        let apk = w[(p, k)];
        let aqk = w[(q, k)];
        w[(p, k)] = c * apk - s * phase * aqk;
        w[(q, k)] = s * apk + c * phase * aqk;
    }
    w[(p, q)] = Complex64::new(0.0, 0.0);
    w[(q, p)] = Complex64::new(0.0, 0.0);
    w[(p, p)] = Complex64::new(app - t * r, 0.0);
    w[(q, q)] = Complex64::new(aqq + t * r, 0.0);

    for k in 0..v.rows() {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * conj_phase * vkq;
        v[(k, q)] = s * vkp + c * conj_phase * vkq;
    }
}

pub(crate) fn fix_phases(v: &mut ComplexMatrix) {
    for c in 0..v.cols() {
        let lead = (0..v.rows()).map(|r| v[(r, c)]).find(|z| z.norm() > 1e-10);
        if let Some(z) = lead {
            let u = z.conj() / z.norm();
            for r in 0..v.rows() {
                v[(r, c)] *= u;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::matrix::{I, ZERO};

    #[test]
    fn pauli_x_spectrum() {
        let x = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let e = eig_hermitian(&x).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-15);
        assert!(e.reconstruction_error(&x) < 1e-14);
    }

    #[test]
    fn zero_matrix_gives_identity_vectors() {
        let z = ComplexMatrix::zeros(2, 2);
        let e = eig_hermitian(&z).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0, 0.0]);
        assert_eq!(e.eigenvectors, ComplexMatrix::identity(2));
    }

    #[test]
    fn pauli_y_has_complex_eigenvectors() {
        let y = ComplexMatrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO]).unwrap();
        let e = eig_hermitian(&y).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!(e.reconstruction_error(&y) < 1e-14);
        assert!(e.orthonormality_error() < 1e-14);
        // leading component made real-positive
        for k in 0..2 {
            let lead = e.eigenvectors[(0, k)];
            assert!(lead.re > 0.0 && lead.im.abs() < 1e-15);
        }
    }

    #[test]
    fn rejects_non_square_and_non_hermitian() {
        assert!(matches!(
            eig_hermitian(&ComplexMatrix::zeros(2, 3)),
            Err(Error::Dimension(_))
        ));
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 2.0, 0.0, 1.0]).unwrap();
        match eig_hermitian(&a) {
            Err(Error::NotHermitian { residual, .. }) => assert_eq!(residual, 2.0),
            other => panic!("unexpected {other:?}"),
        }
    }
}

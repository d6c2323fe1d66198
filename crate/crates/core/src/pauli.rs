//! Pauli-string expansion of Hermitian qubit operators.
//!
//! A string `σ_0 ⊗ σ_1 ⊗ … ⊗ σ_{q−1}` (leftmost factor on the most significant
//! qubit) is stored as an X-mask and a Z-mask. It maps a basis state `|k>` to
//! `i^{#Y} (−1)^{popcount(k & z)} |k ⊕ x>`, so every string has exactly one
//! unit-modulus entry per row and `trace(P·H)` costs `O(2^q)`.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numerics::{norm, ComplexMatrix, HermitianOperator};

/// Default magnitude below which a coefficient counts as zero.
pub const DEFAULT_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

/// Tensor product of single-qubit Paulis; orders lexicographically with
/// `I < X < Y < Z` and the leftmost symbol most significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString {
    ops: Vec<Pauli>,
    x_mask: usize,
    z_mask: usize,
}

impl PauliString {
    pub fn new(ops: Vec<Pauli>) -> Self {
        let q = ops.len();
        let (mut x_mask, mut z_mask) = (0, 0);
        for (j, p) in ops.iter().enumerate() {
            let bit = 1usize << (q - 1 - j);
            let (x, z) = p.bits();
            if x {
                x_mask |= bit;
            }
            if z {
                z_mask |= bit;
            }
        }
        Self { ops, x_mask, z_mask }
    }

    /// The `index`-th string of `q` qubits in lexicographic order.
    pub fn from_index(index: usize, q: usize) -> Self {
        let ops = (0..q).map(|j| Pauli::ALL[(index >> (2 * (q - 1 - j))) & 3]).collect();
        Self::new(ops)
    }

    pub fn identity(q: usize) -> Self {
        Self::new(vec![Pauli::I; q])
    }

    pub fn qubits(&self) -> usize {
        self.ops.len()
    }

    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    pub fn x_mask(&self) -> usize {
        self.x_mask
    }

    pub fn z_mask(&self) -> usize {
        self.z_mask
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    pub fn label(&self) -> String {
        self.ops.iter().map(|p| p.symbol()).collect()
    }

    /// `(target, phase)` with `P|k> = phase |target>`.
    #[inline]
    pub fn apply(&self, k: usize) -> (usize, Complex64) {
        (k ^ self.x_mask, self.phase(k))
    }

    #[inline]
    fn phase(&self, k: usize) -> Complex64 {
        let y_count = self.y_count();
        let sign = if (k & self.z_mask).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        match y_count % 4 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        let dim = 1usize << self.qubits();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for k in 0..dim {
            let (t, ph) = self.apply(k);
            m[(t, k)] = ph;
        }
        m
    }

    /// `<psi|P|psi>`.
    pub fn expectation(&self, psi: &[Complex64]) -> Complex64 {
        psi.iter()
            .enumerate()
            .map(|(k, &a)| {
                let (t, ph) = self.apply(k);
                psi[t].conj() * ph * a
            })
            .sum()
    }

    /// `trace(P·H)` for a `2^q × 2^q` matrix.
    fn trace_product(&self, h: &ComplexMatrix) -> Complex64 {
        (0..h.rows())
            .map(|k| {
                let (t, ph) = self.apply(k);
                ph * h[(k, t)]
            })
            .sum()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let ops = s
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::Domain(format!("invalid Pauli symbol '{other}' in '{s}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if ops.is_empty() {
            return Err(Error::Domain("empty Pauli label".into()));
        }
        Ok(Self::new(ops))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PauliTerm {
    pub string: PauliString,
    pub coefficient: f64,
}

/// Real linear combination of distinct Pauli strings on a fixed register.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    qubits: usize,
    threshold: f64,
    terms: Vec<PauliTerm>,
}

impl PauliSum {
    /// Builds a sum from explicit labels, rejecting duplicates and labels of
    /// the wrong length. Terms are kept in lexicographic order.
    pub fn from_terms(qubits: usize, terms: &[(&str, f64)]) -> Result<Self> {
        let mut out: Vec<PauliTerm> = terms
            .iter()
            .map(|(label, c)| {
                let string: PauliString = label.parse()?;
                if string.qubits() != qubits {
                    return Err(Error::Dimension(format!("label {label} does not act on {qubits} qubits")));
                }
                Ok(PauliTerm {
                    string,
                    coefficient: *c,
                })
            })
            .collect::<Result<_>>()?;
        out.sort_by(|a, b| a.string.cmp(&b.string));
        if let Some(w) = out.windows(2).find(|w| w[0].string == w[1].string) {
            return Err(Error::Domain(format!("duplicate Pauli label {}", w[0].string)));
        }
        Ok(Self {
            qubits,
            threshold: 0.0,
            terms: out,
        })
    }

    pub fn identity(qubits: usize) -> Self {
        Self {
            qubits,
            threshold: 0.0,
            terms: vec![PauliTerm {
                string: PauliString::identity(qubits),
                coefficient: 1.0,
            }],
        }
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, label: &str) -> Option<f64> {
        self.terms
            .iter()
            .find(|t| t.string.label() == label)
            .map(|t| t.coefficient)
    }

    /// Number of terms with `|coefficient| > threshold`.
    pub fn count_above(&self, threshold: f64) -> usize {
        self.terms.iter().filter(|t| t.coefficient.abs() > threshold).count()
    }

    /// Half-open threshold interval `[lo, hi)` over which `count_above`
    /// returns exactly `target`, or `None` if the retained magnitudes make
    /// that count unreachable.
    pub fn threshold_window(&self, target: usize) -> Option<(f64, f64)> {
        let mut mags: Vec<f64> = self.terms.iter().map(|t| t.coefficient.abs()).collect();
        mags.sort_by(|a, b| b.total_cmp(a));
        if target > mags.len() {
            return None;
        }
        let hi = if target == 0 { f64::INFINITY } else { mags[target - 1] };
        let lo = mags.get(target).copied().unwrap_or(self.threshold).max(self.threshold);
        (lo < hi).then_some((lo, hi))
    }

    /// Writes `label,coefficient` rows in lexicographic order.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "label,coefficient")?;
        for t in &self.terms {
            writeln!(w, "{},{}", t.string, crate::fmt_f64(t.coefficient))?;
        }
        Ok(())
    }
}

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim < 2 || !dim.is_power_of_two() {
        return Err(Error::Dimension(format!("operator dimension {dim} is not a power of two >= 2")));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Expands `h` over all `4^q` Pauli strings, `a_n = trace(P_n·h)/2^q`, keeping
/// terms with `|a_n| > threshold`.
///
/// Strings are scanned in parallel; the result is always in lexicographic order.
pub fn decompose(h: &HermitianOperator, threshold: f64) -> Result<PauliSum> {
    let q = qubits_for_dim(h.dim())?;
    let dim = h.dim() as f64;
    let imag_tol = 1e-10 * h.max_abs().max(1.0);
    let matrix = h.matrix();

    let coefficients: Vec<Result<Option<PauliTerm>>> = (0..1usize << (2 * q))
        .into_par_iter()
        .map(|n| {
            let string = PauliString::from_index(n, q);
            let a = string.trace_product(matrix) / dim;
            if a.im.abs() > imag_tol {
                return Err(Error::ComplexCoefficient {
                    label: string.label(),
                    imag: a.im,
                });
            }
            Ok((a.re.abs() > threshold).then_some(PauliTerm {
                string,
                coefficient: a.re,
            }))
        })
        .collect();

    let mut terms = Vec::new();
    for c in coefficients {
        if let Some(t) = c? {
            terms.push(t);
        }
    }
    Ok(PauliSum {
        qubits: q,
        threshold,
        terms,
    })
}

/// Dense matrix `Σ a_n P_n`.
pub fn reconstruct(sum: &PauliSum) -> HermitianOperator {
    let dim = 1usize << sum.qubits;
    let mut m = ComplexMatrix::zeros(dim, dim);
    for t in &sum.terms {
        for k in 0..dim {
            let (target, ph) = t.string.apply(k);
            m[(target, k)] += ph * t.coefficient;
        }
    }
    HermitianOperator::new(m).expect("real combination of Pauli strings is Hermitian")
}

/// `Σ a_n <psi|P_n|psi>` without forming a dense matrix.
pub fn expectation(sum: &PauliSum, psi: &[Complex64]) -> Result<f64> {
    if psi.len() != 1usize << sum.qubits {
        return Err(Error::Dimension(format!(
            "state has {} amplitudes, operator acts on {} qubits",
            psi.len(),
            sum.qubits
        )));
    }
    let n = norm(psi);
    if (n - 1.0).abs() > 1e-10 {
        return Err(Error::Domain(format!("state is not normalized (norm {n})")));
    }
    let total: Complex64 = sum
        .terms
        .iter()
        .map(|t| t.string.expectation(psi) * t.coefficient)
        .sum();
    debug_assert!(total.im.abs() < 1e-10 * (1.0 + total.re.abs()));
    Ok(total.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{p_osc, q_osc};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn single_qubit_strings() {
        let x: PauliString = "X".parse().unwrap();
        let y: PauliString = "Y".parse().unwrap();
        let z: PauliString = "Z".parse().unwrap();
        assert_eq!(x.apply(0), (1, Complex64::new(1.0, 0.0)));
        assert_eq!(y.apply(0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(y.apply(1), (0, Complex64::new(0.0, -1.0)));
        assert_eq!(z.apply(1), (1, Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn lexicographic_indexing() {
        assert_eq!(PauliString::from_index(0, 2).label(), "II");
        assert_eq!(PauliString::from_index(1, 2).label(), "IX");
        assert_eq!(PauliString::from_index(4, 2).label(), "XI");
        assert_eq!(PauliString::from_index(15, 2).label(), "ZZ");
        assert!(PauliString::from_index(3, 2) < PauliString::from_index(4, 2));
    }

    #[test]
    fn label_most_significant_first() {
        // X on qubit 0 flips the high bit
        let s: PauliString = "XI".parse().unwrap();
        assert_eq!(s.apply(0).0, 2);
    }

    #[test]
    fn oscillator_matrices_decompose_to_single_terms() {
        let q = decompose(&q_osc(2).unwrap(), 1e-12).unwrap();
        assert_eq!(q.len(), 1);
        assert!((q.coefficient("X").unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        let p = decompose(&p_osc(2).unwrap(), 1e-12).unwrap();
        assert_eq!(p.len(), 1);
        assert!((p.coefficient("Y").unwrap() - FRAC_1_SQRT_2).abs() < 1e-15);
        let back = reconstruct(&q);
        assert!(back.max_abs_diff(q_osc(2).unwrap().matrix()) < 1e-15);
    }

    #[test]
    fn empty_sum_reconstructs_to_zero() {
        let s = PauliSum::from_terms(2, &[]).unwrap();
        assert_eq!(reconstruct(&s).max_abs(), 0.0);
    }

    #[test]
    fn z_expectations() {
        let z = PauliSum::from_terms(1, &[("Z", 1.0)]).unwrap();
        let zero = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        assert_eq!(expectation(&z, &zero).unwrap(), 1.0);
        let plus = [Complex64::new(FRAC_1_SQRT_2, 0.0); 2];
        assert!(expectation(&z, &plus).unwrap().abs() < 1e-15);
        assert!(matches!(expectation(&z, &[Complex64::new(1.0, 0.0); 4]), Err(Error::Dimension(_))));
        assert!(matches!(expectation(&z, &[Complex64::new(1.0, 0.0); 2]), Err(Error::Domain(_))));
    }

    #[test]
    fn bad_dimension_and_labels() {
        let h = HermitianOperator::identity(3);
        assert!(matches!(decompose(&h, 0.0), Err(Error::Dimension(_))));
        assert!(PauliSum::from_terms(2, &[("XA", 1.0)]).is_err());
        assert!(PauliSum::from_terms(2, &[("X", 1.0)]).is_err());
        assert!(PauliSum::from_terms(1, &[("X", 1.0), ("X", 2.0)]).is_err());
    }

    #[test]
    fn identity_coefficient_is_normalized_trace() {
        let h = reconstruct(&PauliSum::from_terms(2, &[("II", 0.3), ("XZ", -1.25), ("YY", 2.0)]).unwrap());
        let s = decompose(&h, 0.0).unwrap();
        assert_eq!(s.coefficient("II").unwrap(), h.trace().re / 4.0);
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn window_brackets_counts() {
        let s = PauliSum::from_terms(2, &[("II", 1.0), ("XX", 1e-3), ("ZZ", 1e-6)]).unwrap();
        assert_eq!(s.threshold_window(2), Some((1e-6, 1e-3)));
        assert_eq!(s.threshold_window(3), Some((0.0, 1e-6)));
        assert_eq!(s.threshold_window(0), Some((1.0, f64::INFINITY)));
        assert_eq!(s.threshold_window(4), None);
        let (lo, hi) = s.threshold_window(2).unwrap();
        assert_eq!(s.count_above(lo), 2);
        assert_eq!(s.count_above(hi), 1);
    }

    #[test]
    fn csv_export() {
        let s = PauliSum::from_terms(2, &[("ZI", 0.5), ("XY", -0.25)]).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "label,coefficient");
        assert!(lines[1].starts_with("XY,"));
        assert!(lines[2].starts_with("ZI,"));
        let c: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(c, -0.25);
    }

    #[test]
    fn mass_operator_term_counts() {
        use crate::model::{build_operators, ModelConfig};
        for (q, expected) in [(4, 57), (6, 745)] {
            let ops = build_operators(&ModelConfig::reference(q)).unwrap();
            let s = decompose(&ops.mass_4m, 1e-12).unwrap();
            assert_eq!(s.len(), expected, "q={q}");
            let full = decompose(&ops.mass_4m, 0.0).unwrap();
            let (lo, hi) = full.threshold_window(expected).unwrap();
            assert!(lo < 1e-14 && hi > 1e-8, "q={q}: [{lo:e}, {hi:e})");
        }
    }
}

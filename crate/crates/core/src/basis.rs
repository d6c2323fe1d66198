//! Position and momentum matrices in truncated single-variable bases, and the
//! two-variable `(u, v)` register built from them by tensor products.
//!
//! Each variable gets `N = 2^{q/2}` levels. The `u` variable occupies the left
//! (most significant) tensor slot, so `u = Q ⊗ I` and `v = I ⊗ Q`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, HermitianOperator, I};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BasisKind {
    #[default]
    Oscillator,
    Position,
    /// Provides `Q` and `P²` only.
    FiniteDifference,
    Ladder,
}

impl BasisKind {
    pub const ALL: [BasisKind; 4] = [
        BasisKind::Oscillator,
        BasisKind::Position,
        BasisKind::FiniteDifference,
        BasisKind::Ladder,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BasisKind::Oscillator => "oscillator",
            BasisKind::Position => "position",
            BasisKind::FiniteDifference => "finite_difference",
            BasisKind::Ladder => "ladder",
        }
    }

    pub fn position(self, n: usize) -> Result<HermitianOperator> {
        match self {
            BasisKind::Oscillator => q_osc(n),
            BasisKind::Position => q_pos(n),
            BasisKind::FiniteDifference => q_fd(n),
            BasisKind::Ladder => {
                let (a, ad) = ladder(n)?;
                HermitianOperator::new((&a + &ad).scale_real(FRAC_1_SQRT_2))
            }
        }
    }

    pub fn momentum(self, n: usize) -> Result<HermitianOperator> {
        match self {
            BasisKind::Oscillator => p_osc(n),
            BasisKind::Position => p_pos(n),
            BasisKind::FiniteDifference => p_fd(n),
            BasisKind::Ladder => {
                let (a, ad) = ladder(n)?;
                HermitianOperator::new((&a - &ad).scale(-I * FRAC_1_SQRT_2))
            }
        }
    }

    pub fn momentum_squared(self, n: usize) -> Result<HermitianOperator> {
        match self {
            BasisKind::FiniteDifference => p2_fd(n),
            _ => {
                let p = self.momentum(n)?;
                HermitianOperator::new(p.matmul(&p))
            }
        }
    }

    pub fn has_momentum(self) -> bool {
        self != BasisKind::FiniteDifference
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BasisKind::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| Error::Domain(format!("unknown basis '{s}'")))
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::Dimension(format!("basis dimension must be at least 2, got {n}")));
    }
    Ok(())
}

/// Oscillator-basis position: `(1/√2)·√k` on the first off-diagonals.
pub fn q_osc(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        let x = Complex64::new((k as f64).sqrt() * FRAC_1_SQRT_2, 0.0);
        m[(k - 1, k)] = x;
        m[(k, k - 1)] = x;
    }
    HermitianOperator::new(m)
}

/// Oscillator-basis momentum: `(i/√2)·(-√k above, +√k below)`.
pub fn p_osc(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        let x = (k as f64).sqrt() * FRAC_1_SQRT_2;
        m[(k - 1, k)] = Complex64::new(0.0, -x);
        m[(k, k - 1)] = Complex64::new(0.0, x);
    }
    HermitianOperator::new(m)
}

fn centered(j: usize, n: usize) -> f64 {
    // j is zero-based; the one-based index j+1 gives 2(j+1) - (N+1)
    (2 * j + 1) as f64 - n as f64
}

/// Position basis: diagonal `√(2π/4N)·(2j − (N+1))`, `j = 1..N`.
pub fn q_pos(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    let h = (2.0 * PI / (4.0 * n as f64)).sqrt();
    let d: Vec<f64> = (0..n).map(|j| h * centered(j, n)).collect();
    HermitianOperator::new(ComplexMatrix::diagonal(&d))
}

/// The unitary `F_{jk} = N^{-1/2} exp[2πi/(4N)·(2j−(N+1))(2k−(N+1))]`.
pub fn position_transform(n: usize) -> Result<ComplexMatrix> {
    check_dim(n)?;
    let norm = 1.0 / (n as f64).sqrt();
    Ok(ComplexMatrix::from_fn(n, n, |j, k| {
        let phase = 2.0 * PI / (4.0 * n as f64) * centered(j, n) * centered(k, n);
        Complex64::from_polar(norm, phase)
    }))
}

/// Position-basis momentum `F† Q_pos F`.
pub fn p_pos(n: usize) -> Result<HermitianOperator> {
    let f = position_transform(n)?;
    let q = q_pos(n)?;
    HermitianOperator::new(f.adjoint().matmul(q.matrix()).matmul(&f))
}

/// Finite-difference position: diagonal `√(1/2N)·(2j − (N+1))`.
pub fn q_fd(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    let h = (1.0 / (2.0 * n as f64)).sqrt();
    let d: Vec<f64> = (0..n).map(|j| h * centered(j, n)).collect();
    HermitianOperator::new(ComplexMatrix::diagonal(&d))
}

/// Finite-difference momentum squared: `(N/2)·tridiag(−1, 2, −1)`.
pub fn p2_fd(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    let s = n as f64 / 2.0;
    let mut m = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        m[(k, k)] = Complex64::new(2.0 * s, 0.0);
        if k + 1 < n {
            m[(k, k + 1)] = Complex64::new(-s, 0.0);
            m[(k + 1, k)] = Complex64::new(-s, 0.0);
        }
    }
    HermitianOperator::new(m)
}

/// The finite-difference basis has no first-power momentum.
pub fn p_fd(n: usize) -> Result<HermitianOperator> {
    check_dim(n)?;
    Err(Error::UnsupportedBasis {
        basis: BasisKind::FiniteDifference.name().into(),
        what: "a first-power momentum operator",
    })
}

/// Lowering and raising operators `A = (iP + Q)/√2`, `A† = (−iP + Q)/√2` in the
/// oscillator basis; `A` carries `√k` on the superdiagonal.
pub fn ladder(n: usize) -> Result<(ComplexMatrix, ComplexMatrix)> {
    check_dim(n)?;
    let mut a = ComplexMatrix::zeros(n, n);
    for k in 1..n {
        a[(k - 1, k)] = Complex64::new((k as f64).sqrt(), 0.0);
    }
    let ad = a.adjoint();
    Ok((a, ad))
}

/// Position and momentum operators of the two minisuperspace variables on a
/// `q`-qubit register.
#[derive(Clone, Debug)]
pub struct VariablePair {
    pub qubits: usize,
    pub basis: BasisKind,
    pub u: HermitianOperator,
    pub v: HermitianOperator,
    /// `None` in the finite-difference basis.
    pub p_u: Option<HermitianOperator>,
    pub p_v: Option<HermitianOperator>,
    pub p2_u: HermitianOperator,
    pub p2_v: HermitianOperator,
}

impl VariablePair {
    /// Levels per variable, `2^{q/2}`.
    pub fn levels(&self) -> usize {
        1 << (self.qubits / 2)
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }
}

pub fn make_pair(qubits: usize, basis: BasisKind) -> Result<VariablePair> {
    if qubits < 2 || qubits % 2 != 0 {
        return Err(Error::Dimension(format!(
            "qubit count must be even and at least 2, got {qubits}"
        )));
    }
    let n = 1usize << (qubits / 2);
    let id = ComplexMatrix::identity(n);
    let left = |op: &HermitianOperator| HermitianOperator::new(op.kron(&id));
    let right = |op: &HermitianOperator| HermitianOperator::new(id.kron(op));

    let q = basis.position(n)?;
    let p2 = basis.momentum_squared(n)?;
    let p = if basis.has_momentum() { Some(basis.momentum(n)?) } else { None };

    Ok(VariablePair {
        qubits,
        basis,
        u: left(&q)?,
        v: right(&q)?,
        p_u: p.as_ref().map(left).transpose()?,
        p_v: p.as_ref().map(right).transpose()?,
        p2_u: left(&p2)?,
        p2_v: right(&p2)?,
    })
}

//! Schwarzschild-de Sitter horizon thermodynamics.
//!
//! Horizons are the positive roots of `r³ − ℓ²r + 2Mℓ² = 0` with `ℓ² = 3/λ`.
//! Entropies are `π r²` and inverse temperatures are `β = dS/dM`, signs kept:
//! `β_ch` and `T_ch` are negative. At the Nariai mass both horizons meet,
//! `T = 0` and `β` is reported as `+∞`.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::nariai_mass;
use crate::numerics::integrate_adaptive;

/// Cosmological constant with `ℓ = 1`, used by the partition function.
pub const UNIT_ELL_LAMBDA: f64 = 3.0;

/// Relative distance to `M_N` treated as exactly Nariai.
const NARIAI_SNAP: f64 = 1e-12;

pub fn ell(lambda: f64) -> f64 {
    (3.0 / lambda).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ThermoPoint {
    pub mass: f64,
    pub lambda: f64,
    pub ell: f64,
    pub r_bh: f64,
    pub r_ch: f64,
    pub s_bh: f64,
    pub s_ch: f64,
    pub s_tot: f64,
    pub beta_bh: f64,
    pub beta_ch: f64,
    pub t_bh: f64,
    pub t_ch: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValues {
    pub s_bh: f64,
    pub s_ch: f64,
    /// `+∞` at `M = 0`.
    pub t_bh: f64,
    pub t_ch: f64,
    pub beta_bh: f64,
    pub beta_ch: f64,
}

fn check_lambda(lambda: f64) -> Result<f64> {
    nariai_mass(lambda)
}

/// Position of `m` relative to the Nariai bound: `Ok(true)` at the bound.
fn classify(m: f64, lambda: f64) -> Result<bool> {
    let m_n = check_lambda(lambda)?;
    if !(m > 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mass must be positive, got {m}")));
    }
    if (m - m_n).abs() <= NARIAI_SNAP * m_n {
        return Ok(true);
    }
    if m > m_n {
        return Err(Error::NoHorizon { mass: m, nariai: m_n });
    }
    Ok(false)
}

/// All three roots `(r_neg, r_bh, r_ch)` from the trigonometric solution.
///
/// `r_bh` is taken from the root product `r_neg·r_bh·r_ch = −2Mℓ²`, which
/// avoids the cancellation in its cosine form at small `M`.
pub fn cubic_roots(m: f64, lambda: f64) -> Result<(f64, f64, f64)> {
    let nariai = classify(m, lambda)?;
    let l = ell(lambda);
    let scale = 2.0 * l / 3f64.sqrt();
    let arg = if nariai { 1.0 } else { (27f64.sqrt() * m / l).min(1.0) };
    let alpha = arg.acos();
    let r_ch = scale * ((PI - alpha) / 3.0).cos();
    let r_neg = -scale * (alpha / 3.0).cos();
    let r_bh = if nariai { r_ch } else { -2.0 * m * l * l / (r_ch * r_neg) };
    Ok((r_neg, r_bh, r_ch))
}

/// Black-hole and cosmological horizon radii.
pub fn horizons(m: f64, lambda: f64) -> Result<(f64, f64)> {
    let (_, r_bh, r_ch) = cubic_roots(m, lambda)?;
    Ok((r_bh, r_ch))
}

/// `r_bh` in the plain cosine form, `(2ℓ/√3)·cos((π + arccos(√27 M/ℓ))/3)`.
pub fn r_bh_cosine_form(m: f64, lambda: f64) -> Result<f64> {
    classify(m, lambda)?;
    let l = ell(lambda);
    let alpha = (27f64.sqrt() * m / l).min(1.0).acos();
    Ok(2.0 * l / 3f64.sqrt() * ((PI + alpha) / 3.0).cos())
}

/// `(S_bh, S_ch, S_tot)`.
pub fn entropies(m: f64, lambda: f64) -> Result<(f64, f64, f64)> {
    let (r_bh, r_ch) = horizons(m, lambda)?;
    let (s_bh, s_ch) = (PI * r_bh * r_bh, PI * r_ch * r_ch);
    Ok((s_bh, s_ch, s_bh + s_ch))
}

/// `dS/dM = −4πℓ² r / (3r² − ℓ²)` for a horizon at `r`.
fn beta_at(r: f64, l: f64) -> f64 {
    -4.0 * PI * l * l * r / (3.0 * r * r - l * l)
}

/// `(β_bh, β_ch)`; both `+∞` at the Nariai mass.
pub fn inverse_temperatures(m: f64, lambda: f64) -> Result<(f64, f64)> {
    if classify(m, lambda)? {
        return Ok((f64::INFINITY, f64::INFINITY));
    }
    let (r_bh, r_ch) = horizons(m, lambda)?;
    let l = ell(lambda);
    Ok((beta_at(r_bh, l), beta_at(r_ch, l)))
}

/// All derived quantities at `m`. `m = 0` gives the pure de Sitter limit:
/// no black-hole horizon, `r_ch = ℓ`, `T_bh = +∞`.
pub fn thermo_point(m: f64, lambda: f64) -> Result<ThermoPoint> {
    if m == 0.0 {
        check_lambda(lambda)?;
        let l = ell(lambda);
        let beta_ch = -2.0 * PI * l;
        return Ok(ThermoPoint {
            mass: 0.0,
            lambda,
            ell: l,
            r_bh: 0.0,
            r_ch: l,
            s_bh: 0.0,
            s_ch: PI * l * l,
            s_tot: PI * l * l,
            beta_bh: 0.0,
            beta_ch,
            t_bh: f64::INFINITY,
            t_ch: 1.0 / beta_ch,
        });
    }
    let (r_bh, r_ch) = horizons(m, lambda)?;
    let (s_bh, s_ch, s_tot) = entropies(m, lambda)?;
    let (beta_bh, beta_ch) = inverse_temperatures(m, lambda)?;
    let t = |b: f64| if b.is_infinite() { 0.0 } else { 1.0 / b };
    Ok(ThermoPoint {
        mass: m,
        lambda,
        ell: ell(lambda),
        r_bh,
        r_ch,
        s_bh,
        s_ch,
        s_tot,
        beta_bh,
        beta_ch,
        t_bh: t(beta_bh),
        t_ch: t(beta_ch),
    })
}

/// Small-mass expansions, truncated at the orders
/// `S_bh = 4πM² + 32πM⁴/ℓ²`, `S_ch = πℓ² − 2πMℓ`,
/// `T_bh = 1/(8πM) − 2M/(πℓ²)`, `T_ch = −1/(2πℓ) + M/(πℓ²)`,
/// `β_bh = 8πM + 128πM³/ℓ²`, `β_ch = −2πℓ − 4πM`.
pub fn series_expansions(m: f64, lambda: f64) -> Result<SeriesValues> {
    check_lambda(lambda)?;
    if !(m >= 0.0) || !m.is_finite() {
        return Err(Error::Domain(format!("mass must be non-negative, got {m}")));
    }
    let l = ell(lambda);
    let l2 = l * l;
    let m2 = m * m;
    Ok(SeriesValues {
        s_bh: 4.0 * PI * m2 + 32.0 * PI * m2 * m2 / l2,
        s_ch: PI * l2 - 2.0 * PI * m * l,
        t_bh: if m == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (8.0 * PI * m) - 2.0 * m / (PI * l2)
        },
        t_ch: -1.0 / (2.0 * PI * l) + m / (PI * l2),
        beta_bh: 8.0 * PI * m + 128.0 * PI * m * m2 / l2,
        beta_ch: -2.0 * PI * l - 4.0 * PI * m,
    })
}

/// `S_bh(M)` at `λ = 3`, extended by 0 at `M = 0`.
fn unit_ell_black_hole_entropy(m: f64) -> f64 {
    if m <= 0.0 {
        0.0
    } else {
        entropies(m, UNIT_ELL_LAMBDA).map(|s| s.0).unwrap_or(f64::NAN)
    }
}

/// Integrand `e^{S_bh(M)} e^{−βM}` of the partition function at `ℓ = 1`.
pub fn partition_integrand(m: f64, beta: f64) -> f64 {
    (unit_ell_black_hole_entropy(m) - beta * m).exp()
}

/// `Z(β) = ∫₀^{1/√27} e^{S_bh(M)} e^{−βM} dM` at `λ = 3`.
pub fn partition_function(beta: f64, rel_tol: f64) -> Result<f64> {
    if !beta.is_finite() {
        return Err(Error::Domain(format!("beta must be finite, got {beta}")));
    }
    let m_n = nariai_mass(UNIT_ELL_LAMBDA)?;
    integrate_adaptive(|m| partition_integrand(m, beta), 0.0, m_n, rel_tol)
}

/// `n` evenly spaced points on `[m_min, m_max]`.
pub fn sweep(lambda: f64, m_min: f64, m_max: f64, n: usize) -> Result<Vec<ThermoPoint>> {
    if n < 2 || !(m_min < m_max) {
        return Err(Error::Domain(format!(
            "sweep needs m_min < m_max and at least 2 points, got [{m_min}, {m_max}] with {n}"
        )));
    }
    (0..n)
        .map(|i| {
            let m = if i == n - 1 {
                m_max
            } else {
                m_min + (m_max - m_min) * i as f64 / (n - 1) as f64
            };
            thermo_point(m, lambda)
        })
        .collect()
}

pub fn write_sweep_csv<W: Write>(points: &[ThermoPoint], mut w: W) -> io::Result<()> {
    writeln!(w, "M,r_bh,r_ch,S_bh,S_ch,S_tot,beta_bh,beta_ch,T_bh,T_ch")?;
    for p in points {
        let cols = [
            p.mass, p.r_bh, p.r_ch, p.s_bh, p.s_ch, p.s_tot, p.beta_bh, p.beta_ch, p.t_bh, p.t_ch,
        ];
        let row: Vec<String> = cols.iter().map(|&x| crate::fmt_f64(x)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

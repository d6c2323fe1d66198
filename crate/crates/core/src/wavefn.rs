//! Continuum wavefunctions from oscillator coefficients, the WKB form, and
//! plot-ready grids of the classical potentials and mass level functions.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{mass_ab, mass_uv, potential_s, potential_sd};

/// Evenly spaced samples `lo, …, hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl Axis {
    /// `[−8, 8]` with 161 points (step 0.1).
    pub const DEFAULT: Axis = Axis {
        lo: -8.0,
        hi: 8.0,
        samples: 161,
    };

    pub fn new(lo: f64, hi: f64, samples: usize) -> Result<Self> {
        let axis = Self { lo, hi, samples };
        axis.validate()?;
        Ok(axis)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo < self.hi) || !self.lo.is_finite() || !self.hi.is_finite() || self.samples < 2 {
            return Err(Error::Domain(format!(
                "axis needs finite lo < hi and at least 2 samples, got [{}, {}] with {}",
                self.lo, self.hi, self.samples
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / (self.samples - 1) as f64
    }

    pub fn points(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.samples)
            .map(|i| if i == self.samples - 1 { self.hi } else { self.lo + h * i as f64 })
            .collect()
    }

    fn trapezoid_weights(&self) -> Vec<f64> {
        let h = self.step();
        (0..self.samples)
            .map(|i| if i == 0 || i == self.samples - 1 { 0.5 * h } else { h })
            .collect()
    }
}

/// Coefficients `a[m][n]` of `Σ a_mn φ_m(u) φ_n(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientGrid {
    levels: usize,
    data: Vec<Complex64>,
}

impl CoefficientGrid {
    pub fn zeros(levels: usize) -> Self {
        Self {
            levels,
            data: vec![Complex64::new(0.0, 0.0); levels * levels],
        }
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.data[m * self.levels + n]
    }

    pub fn set(&mut self, m: usize, n: usize, value: Complex64) {
        self.data[m * self.levels + n] = value;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Statevector with the `u` level as the most significant index.
    pub fn flatten(&self) -> Vec<Complex64> {
        self.data.clone()
    }
}

/// `a[m][n] = psi[m·N + n]` with `N = 2^{q/2}`.
pub fn reshape_state(psi: &[Complex64], qubits: usize) -> Result<CoefficientGrid> {
    if qubits == 0 || qubits % 2 != 0 {
        return Err(Error::Dimension(format!("qubit count must be even and positive, got {qubits}")));
    }
    if psi.len() != 1 << qubits {
        return Err(Error::Dimension(format!(
            "state has {} amplitudes, expected {}",
            psi.len(),
            1usize << qubits
        )));
    }
    Ok(CoefficientGrid {
        levels: 1 << (qubits / 2),
        data: psi.to_vec(),
    })
}

/// Physicists' Hermite polynomials `H_0(x), …, H_{count−1}(x)`.
pub fn hermite_polynomials(x: f64, count: usize) -> Vec<f64> {
    let mut h = Vec::with_capacity(count);
    if count > 0 {
        h.push(1.0);
    }
    if count > 1 {
        h.push(2.0 * x);
    }
    for k in 1..count.saturating_sub(1) {
        let next = 2.0 * x * h[k] - 2.0 * k as f64 * h[k - 1];
        h.push(next);
    }
    h
}

/// Normalized oscillator eigenfunctions `H_k(x) e^{−x²/2} / (2^k k! √π)^{1/2}`.
pub fn oscillator_functions(x: f64, count: usize) -> Vec<f64> {
    let gauss = (-0.5 * x * x).exp();
    let mut norm = PI.sqrt();
    hermite_polynomials(x, count)
        .into_iter()
        .enumerate()
        .map(|(k, h)| {
            if k > 0 {
                norm *= 2.0 * k as f64;
            }
            h * gauss / norm.sqrt()
        })
        .collect()
}

/// `Ψ(u, v) = Σ a_mn φ_m(u) φ_n(v)`.
pub fn hermite_eval(grid: &CoefficientGrid, u: f64, v: f64) -> Complex64 {
    let n = grid.levels;
    let fu = oscillator_functions(u, n);
    let fv = oscillator_functions(v, n);
    let mut total = Complex64::new(0.0, 0.0);
    for (m, &pu) in fu.iter().enumerate() {
        for (k, &pv) in fv.iter().enumerate() {
            total += grid.get(m, k) * (pu * pv);
        }
    }
    total
}

/// Complex samples on a rectangular grid, `values[i·|v| + j] = f(u_i, v_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldGrid {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Contour level of interest, if any.
    pub level: Option<f64>,
}

impl FieldGrid {
    fn sample(u_axis: &Axis, v_axis: &Axis, f: impl Fn(f64, f64) -> Complex64 + Sync) -> Result<Self> {
        u_axis.validate()?;
        v_axis.validate()?;
        let u = u_axis.points();
        let v = v_axis.points();
        let rows: Vec<Vec<Complex64>> = u
            .par_iter()
            .map(|&x| v.iter().map(|&y| f(x, y)).collect())
            .collect();
        let values = rows.concat();
        Ok(Self {
            u,
            v,
            values,
            level: None,
        })
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[i * self.v.len() + j]
    }

    pub fn max_re(&self) -> f64 {
        self.values.iter().fold(f64::NEG_INFINITY, |m, z| m.max(z.re))
    }

    /// Rows `(u, v, re, im, abs2)`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "u,v,re,im,abs2")?;
        for (i, &u) in self.u.iter().enumerate() {
            for (j, &v) in self.v.iter().enumerate() {
                let z = self.get(i, j);
                writeln!(
                    w,
                    "{},{},{},{},{}",
                    crate::fmt_f64(u),
                    crate::fmt_f64(v),
                    crate::fmt_f64(z.re),
                    crate::fmt_f64(z.im),
                    crate::fmt_f64(z.norm_sqr())
                )?;
            }
        }
        Ok(())
    }
}

/// `Ψ` sampled on the `u × v` grid.
pub fn wavefunction_grid(coeffs: &CoefficientGrid, u_axis: &Axis, v_axis: &Axis) -> Result<FieldGrid> {
    FieldGrid::sample(u_axis, v_axis, |u, v| hermite_eval(coeffs, u, v))
}

/// Trapezoid-rule `∫∫ |Ψ|²` over the grid.
pub fn grid_norm_sqr(field: &FieldGrid, u_axis: &Axis, v_axis: &Axis) -> f64 {
    let wu = u_axis.trapezoid_weights();
    let wv = v_axis.trapezoid_weights();
    let mut total = 0.0;
    for (i, a) in wu.iter().enumerate() {
        for (j, b) in wv.iter().enumerate() {
            total += a * b * field.get(i, j).norm_sqr();
        }
    }
    total
}

/// Trapezoid-rule overlap `∫∫ φ_m(u) φ_n(v) Ψ(u, v)`.
pub fn project_coefficient(field: &FieldGrid, u_axis: &Axis, v_axis: &Axis, m: usize, n: usize) -> Complex64 {
    let wu = u_axis.trapezoid_weights();
    let wv = v_axis.trapezoid_weights();
    let mut total = Complex64::new(0.0, 0.0);
    for (i, &u) in field.u.iter().enumerate() {
        let fu = oscillator_functions(u, m + 1)[m];
        for (j, &v) in field.v.iter().enumerate() {
            let fv = oscillator_functions(v, n + 1)[n];
            total += field.get(i, j) * (wu[i] * wv[j] * fu * fv);
        }
    }
    total
}

/// Max of `|Ψ(u, v) − Ψ(−u, −v)|` over a grid symmetric about the origin.
pub fn parity_defect(field: &FieldGrid) -> f64 {
    let (nu, nv) = (field.u.len(), field.v.len());
    let mut worst = 0.0f64;
    for i in 0..nu {
        for j in 0..nv {
            worst = worst.max((field.get(i, j) - field.get(nu - 1 - i, nv - 1 - j)).norm());
        }
    }
    worst
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PotentialSample {
    pub x: f64,
    pub v_s: f64,
    pub v_sd: f64,
}

/// `V_S(x)` and `V_SD(x)` along one axis.
pub fn potential_grid(lambda: f64, axis: &Axis) -> Result<Vec<PotentialSample>> {
    axis.validate()?;
    Ok(axis
        .points()
        .into_iter()
        .map(|x| PotentialSample {
            x,
            v_s: potential_s(x),
            v_sd: potential_sd(x, lambda),
        })
        .collect())
}

pub fn write_potential_csv<W: Write>(samples: &[PotentialSample], mut w: W) -> io::Result<()> {
    writeln!(w, "x,V_S,V_SD")?;
    for s in samples {
        writeln!(
            w,
            "{},{},{}",
            crate::fmt_f64(s.x),
            crate::fmt_f64(s.v_s),
            crate::fmt_f64(s.v_sd)
        )?;
    }
    Ok(())
}

/// `M(p_a, b)` with `u` = `p_a` and `v` = `b`; the level is `mass`.
pub fn contour_grid_ab(mass: f64, lambda: f64, p_axis: &Axis, b_axis: &Axis) -> Result<FieldGrid> {
    b_axis.validate()?;
    if !(b_axis.lo > 0.0) {
        return Err(Error::Domain(format!("b axis must be positive, starts at {}", b_axis.lo)));
    }
    let mut g = FieldGrid::sample(p_axis, b_axis, |p, b| {
        Complex64::new(mass_ab(p, b, lambda).unwrap_or(f64::NAN), 0.0)
    })?;
    g.level = Some(mass);
    Ok(g)
}

/// `4M(p_u + p_v, u − v)` with `u` = momentum sum and `v` = `u − v`; the
/// level is `4·mass`.
pub fn contour_grid_uv(mass: f64, lambda: f64, p_axis: &Axis, x_axis: &Axis) -> Result<FieldGrid> {
    let mut g = FieldGrid::sample(p_axis, x_axis, |p, x| Complex64::new(mass_uv(p, x, lambda), 0.0))?;
    g.level = Some(4.0 * mass);
    Ok(g)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WkbForm {
    /// Radicand `λb³/3 + 2m/b − 1`.
    #[default]
    Printed,
    /// Radicand `λb²/3 + 2m/b − 1`.
    Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    Allowed,
    Forbidden,
    TurningPoint,
}

impl Region {
    pub fn flag(self) -> i32 {
        match self {
            Region::Allowed => 1,
            Region::Forbidden => 0,
            Region::TurningPoint => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WkbSample {
    pub a: f64,
    pub b: f64,
    /// `None` at a turning point, where the amplitude diverges.
    pub value: Option<Complex64>,
    pub region: Region,
}

pub fn wkb_radicand(b: f64, m: f64, lambda: f64, form: WkbForm) -> f64 {
    let cosmological = match form {
        WkbForm::Printed => lambda * b.powi(3) / 3.0,
        WkbForm::Metric => lambda * b * b / 3.0,
    };
    cosmological + 2.0 * m / b - 1.0
}

/// `Ψ = (b^{−3/2}/R)^{1/2} exp(i a b R^{1/2})` with principal square roots.
pub fn wkb(a: f64, b: f64, m: f64, lambda: f64, form: WkbForm) -> Result<WkbSample> {
    if !(b > 0.0) || !b.is_finite() {
        return Err(Error::Domain(format!("b must be positive, got {b}")));
    }
    let r = wkb_radicand(b, m, lambda, form);
    let scale = 1.0 + 2.0 * m.abs() / b + lambda.abs() * b.powi(3);
    if r.abs() <= 1e-12 * scale {
        return Ok(WkbSample {
            a,
            b,
            value: None,
            region: Region::TurningPoint,
        });
    }
    let amp2 = b.powf(-1.5) / r.abs();
    let (value, region) = if r > 0.0 {
        let phase = a * b * r.sqrt();
        (Complex64::from_polar(amp2.sqrt(), phase), Region::Allowed)
    } else {
        // √(negative) = i√|·|, so the exponent turns real
        let decay = (-a * b * (-r).sqrt()).exp();
        (Complex64::new(0.0, amp2.sqrt() * decay), Region::Forbidden)
    };
    Ok(WkbSample {
        a,
        b,
        value: Some(value),
        region,
    })
}

pub fn wkb_grid(m: f64, lambda: f64, form: WkbForm, a_axis: &Axis, b_axis: &Axis) -> Result<Vec<WkbSample>> {
    a_axis.validate()?;
    b_axis.validate()?;
    let bs = b_axis.points();
    a_axis
        .points()
        .into_iter()
        .flat_map(|a| bs.iter().map(move |&b| (a, b)))
        .map(|(a, b)| wkb(a, b, m, lambda, form))
        .collect()
}

/// Rows `(a, b, re, im, abs2, allowed_flag)`; turning points carry `nan`
/// values and flag −1.
pub fn write_wkb_csv<W: Write>(samples: &[WkbSample], mut w: W) -> io::Result<()> {
    writeln!(w, "a,b,re,im,abs2,allowed_flag")?;
    for s in samples {
        let z = s.value.unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        writeln!(
            w,
            "{},{},{},{},{},{}",
            crate::fmt_f64(s.a),
            crate::fmt_f64(s.b),
            crate::fmt_f64(z.re),
            crate::fmt_f64(z.im),
            crate::fmt_f64(z.norm_sqr()),
            s.region.flag()
        )?;
    }
    Ok(())
}

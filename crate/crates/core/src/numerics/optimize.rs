//! Bound-constrained limited-memory quasi-Newton minimization.
//!
//! Search directions come from the L-BFGS two-loop recursion restricted to the
//! variables that are not held at an active bound. Trial points are projected
//! onto the box and accepted by a backtracking Armijo test along the projected
//! path, so every accepted iterate is feasible and strictly improves `f`.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    pub max_iterations: usize,
    pub gradient_tolerance: f64,
    pub memory_pairs: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl OptimizerSettings {
    /// Same box `[lo, hi]` for all `n` parameters, 500 iterations,
    /// gradient tolerance `1e-9` and 10 correction pairs.
    pub fn boxed(n: usize, lo: f64, hi: f64) -> Self {
        Self {
            max_iterations: 500,
            gradient_tolerance: 1e-9,
            memory_pairs: 10,
            lower: vec![lo; n],
            upper: vec![hi; n],
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_gradient_tolerance(mut self, tol: f64) -> Self {
        self.gradient_tolerance = tol;
        self
    }

    pub fn with_memory_pairs(mut self, m: usize) -> Self {
        self.memory_pairs = m;
        self
    }

    pub fn dimension(&self) -> usize {
        self.lower.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(Error::Settings("max_iterations must be at least 1".into()));
        }
        if !(self.gradient_tolerance > 0.0) {
            return Err(Error::Settings("gradient_tolerance must be positive".into()));
        }
        if self.memory_pairs < 1 {
            return Err(Error::Settings("memory_pairs must be at least 1".into()));
        }
        if self.lower.len() != self.upper.len() {
            return Err(Error::Settings("lower and upper bounds differ in length".into()));
        }
        if let Some(i) = (0..self.lower.len()).find(|&i| !(self.lower[i] <= self.upper[i])) {
            return Err(Error::Settings(format!(
                "bound {i}: lower {} exceeds upper {}",
                self.lower[i], self.upper[i]
            )));
        }
        Ok(())
    }

    fn project(&self, x: &mut [f64]) {
        for (i, xi) in x.iter_mut().enumerate() {
            *xi = xi.clamp(self.lower[i], self.upper[i]);
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    /// Best-so-far objective after each iteration, starting at iteration 0.
    pub trace: Vec<(usize, f64)>,
    pub iterations: usize,
    pub function_evaluations: usize,
    pub gradient_evaluations: usize,
    pub converged: bool,
}

/// Minimizes `f` over the box in `settings`, starting from the feasible `x0`.
pub fn minimize_bounded<F, G>(mut f: F, mut grad: G, x0: &[f64], settings: &OptimizerSettings) -> Result<Minimum>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    settings.validate()?;
    let n = x0.len();
    if settings.dimension() != n {
        return Err(Error::Settings(format!(
            "bounds cover {} parameters, start point has {n}",
            settings.dimension()
        )));
    }
    if let Some(i) = (0..n).find(|&i| !(x0[i] >= settings.lower[i] && x0[i] <= settings.upper[i])) {
        return Err(Error::Settings(format!("start point component {i} = {} is outside its bounds", x0[i])));
    }

    let mut x = x0.to_vec();
    let mut fx = f(&x);
    let mut g = grad(&x);
    let mut f_evals = 1;
    let mut g_evals = 1;
    if !fx.is_finite() || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteGradient {
            x,
            value: fx,
            iterations: 0,
        });
    }

    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(settings.memory_pairs);
    let mut trace = vec![(0, fx)];
    let mut converged = false;
    let mut iterations = 0;

    while iterations < settings.max_iterations {
        let free = free_variables(&x, &g, settings);
        let pg_norm = (0..n).filter(|&i| free[i]).map(|i| g[i].abs()).fold(0.0, f64::max);
        if pg_norm <= settings.gradient_tolerance {
            converged = true;
            break;
        }

        let mut direction = two_loop(&g, &free, &memory);
        let slope: f64 = direction.iter().zip(&g).map(|(d, gi)| d * gi).sum();
        if !(slope < 0.0) {
            memory.clear();
            direction = steepest(&g, &free);
        }
        let first_step = if memory.is_empty() {
            (1.0 / pg_norm).min(1.0)
        } else {
            1.0
        };

        let accepted = match line_search(&mut f, &x, fx, &g, &direction, first_step, settings, &mut f_evals) {
            Some(step) => Some(step),
            None if !memory.is_empty() => {
                memory.clear();
                direction = steepest(&g, &free);
                line_search(&mut f, &x, fx, &g, &direction, (1.0 / pg_norm).min(1.0), settings, &mut f_evals)
            }
            None => None,
        };
        let Some((x_new, f_new)) = accepted else {
            // no feasible decrease along the projected path: stationary to
            // working precision
            converged = pg_norm <= settings.gradient_tolerance.sqrt();
            break;
        };

        let g_new = grad(&x_new);
        g_evals += 1;
        iterations += 1;
        if g_new.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteGradient {
                x,
                value: fx,
                iterations,
            });
        }

        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy: f64 = s.iter().zip(&y).map(|(a, b)| a * b).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        if sy > f64::EPSILON * yy && sy > 0.0 {
            if memory.len() == settings.memory_pairs {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }

        let improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        trace.push((iterations, fx));
        if improvement <= f64::EPSILON * fx.abs().max(f64::MIN_POSITIVE) {
            let free = free_variables(&x, &g, settings);
            let pg = (0..n).filter(|&i| free[i]).map(|i| g[i].abs()).fold(0.0, f64::max);
            converged = pg <= settings.gradient_tolerance;
            break;
        }
    }

    Ok(Minimum {
        x,
        value: fx,
        trace,
        iterations,
        function_evaluations: f_evals,
        gradient_evaluations: g_evals,
        converged,
    })
}

/// A variable is held when it sits on a bound and the gradient pushes outward.
fn free_variables(x: &[f64], g: &[f64], s: &OptimizerSettings) -> Vec<bool> {
    (0..x.len())
        .map(|i| !((x[i] <= s.lower[i] && g[i] > 0.0) || (x[i] >= s.upper[i] && g[i] < 0.0)))
        .collect()
}

fn steepest(g: &[f64], free: &[bool]) -> Vec<f64> {
    g.iter().zip(free).map(|(&gi, &f)| if f { -gi } else { 0.0 }).collect()
}

fn two_loop(g: &[f64], free: &[bool], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let dot = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .zip(free)
            .filter(|(_, &f)| f)
            .map(|((x, y), _)| x * y)
            .sum()
    };
    let mut q: Vec<f64> = steepest(g, free).into_iter().map(|v| -v).collect();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        for i in 0..q.len() {
            if free[i] {
                q[i] -= a * y[i];
            }
        }
        alphas.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let yy = dot(y, y);
        let sy = dot(s, y);
        if yy > 0.0 && sy > 0.0 {
            let gamma = sy / yy;
            q.iter_mut().for_each(|v| *v *= gamma);
        }
    }
    for ((s, y, rho), a) in memory.iter().zip(alphas.into_iter().rev()) {
        let b = rho * dot(y, &q);
        for i in 0..q.len() {
            if free[i] {
                q[i] += (a - b) * s[i];
            }
        }
    }
    q.iter().zip(free).map(|(&v, &f)| if f { -v } else { 0.0 }).collect()
}

#[allow(clippy::too_many_arguments)]
fn line_search<F: FnMut(&[f64]) -> f64>(
    f: &mut F,
    x: &[f64],
    fx: f64,
    g: &[f64],
    d: &[f64],
    first_step: f64,
    settings: &OptimizerSettings,
    evals: &mut usize,
) -> Option<(Vec<f64>, f64)> {
    const ARMIJO: f64 = 1e-4;
    let mut step = first_step;
    for _ in 0..60 {
        let mut trial: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + step * di).collect();
        settings.project(&mut trial);
        let predicted: f64 = trial.iter().zip(x).zip(g).map(|((t, xi), gi)| gi * (t - xi)).sum();
        if predicted >= 0.0 {
            // projection collapsed the step
            if trial.iter().zip(x).all(|(a, b)| a == b) {
                return None;
            }
        }
        let ft = f(&trial);
        *evals += 1;
        if ft.is_finite() && ft < fx && ft <= fx + ARMIJO * predicted {
            return Some((trial, ft));
        }
        step *= 0.5;
    }
    None
}

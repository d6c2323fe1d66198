use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Real roots of `c3 r^3 + c2 r^2 + c1 r + c0`, ascending and repeated by
/// multiplicity when three real roots exist.
///
/// Three-real-root cubics use the trigonometric form; a single real root comes
/// from Cardano's formula. Every root is then Newton-polished while that
/// strictly reduces `|p(r)|`.
pub fn real_roots_cubic(c3: f64, c2: f64, c1: f64, c0: f64) -> Result<Vec<f64>> {
    if c3 == 0.0 || !c3.is_finite() {
        return Err(Error::Degree);
    }
    let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
    // r = t - a/3 turns the monic cubic into t^3 + p t + q
    let shift = a / 3.0;
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;

    let scale = 1.0 + a.abs() + b.abs().sqrt() + c.abs().cbrt();
    let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
    let disc_tol = 1e-14 * scale.powi(6);

    let mut roots = if p.abs() <= 1e-15 * scale * scale {
        let t = (-q).cbrt();
        if q.abs() <= 1e-15 * scale.powi(3) {
            vec![t, t, t]
        } else {
            vec![t]
        }
    } else if disc <= disc_tol && p < 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let arg = (3.0 * q / (2.0 * p) * (-3.0 / p).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3).map(|k| m * (phi - 2.0 * PI * k as f64 / 3.0).cos()).collect()
    } else {
        let sq = disc.max(0.0).sqrt();
        vec![(-q / 2.0 + sq).cbrt() + (-q / 2.0 - sq).cbrt()]
    };

    for r in roots.iter_mut() {
        *r -= shift;
        *r = polish(*r, c3, c2, c1, c0);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn polish(mut r: f64, c3: f64, c2: f64, c1: f64, c0: f64) -> f64 {
    let eval = |x: f64| ((c3 * x + c2) * x + c1) * x + c0;
    let slope = |x: f64| (3.0 * c3 * x + 2.0 * c2) * x + c1;
    let mut fr = eval(r).abs();
    for _ in 0..8 {
        let d = slope(r);
        if d == 0.0 || fr == 0.0 {
            break;
        }
        let next = r - eval(r) / d;
        let fnext = eval(next).abs();
        if !(fnext < fr) {
            break;
        }
        r = next;
        fr = fnext;
        if fr <= 1e-15 * (1.0 + (c3 * r * r * r).abs()) {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_residuals(c: [f64; 4], roots: &[f64]) {
        for &r in roots {
            let p = ((c[0] * r + c[1]) * r + c[2]) * r + c[3];
            let bound = 1e-9 * f64::max(1.0, r.abs().powi(3) * c[0].abs());
            assert!(p.abs() < bound, "p({r}) = {p}");
        }
    }

    #[test]
    fn factored_cubic() {
        let roots = real_roots_cubic(1.0, 0.0, -1.0, 0.0).unwrap();
        assert_eq!(roots.len(), 3);
        for (r, want) in roots.iter().zip([-1.0, 0.0, 1.0]) {
            assert!((r - want).abs() < 1e-14);
        }
    }

    #[test]
    fn double_root_is_repeated() {
        let roots = real_roots_cubic(1.0, 0.0, -3.0, 2.0).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots[0] + 2.0).abs() < 1e-12);
        assert!((roots[1] - 1.0).abs() < 1e-7);
        assert!((roots[2] - 1.0).abs() < 1e-7);
        check_residuals([1.0, 0.0, -3.0, 2.0], &roots);
    }

    #[test]
    fn horizon_cubic_for_half_mass() {
        // r^3 - l^2 r + 2 M l^2 with l^2 = 300, M = 1/2
        let roots = real_roots_cubic(1.0, 0.0, -300.0, 300.0).unwrap();
        assert_eq!(roots.len(), 3);
        assert!((roots[1] - 1.00337).abs() < 1e-5);
        assert!((roots[2] - 16.797).abs() < 1e-3);
        assert!((roots.iter().sum::<f64>()).abs() < 1e-9);
        check_residuals([1.0, 0.0, -300.0, 300.0], &roots);
    }

    #[test]
    fn single_real_root_and_triple_root() {
        let roots = real_roots_cubic(2.0, 0.0, 2.0, -4.0).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 1.0).abs() < 1e-14);
        let triple = real_roots_cubic(1.0, -3.0, 3.0, -1.0).unwrap();
        assert_eq!(triple.len(), 3);
        for r in triple {
            assert!((r - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn zero_leading_coefficient() {
        assert_eq!(real_roots_cubic(0.0, 1.0, 1.0, 1.0), Err(Error::Degree));
    }
}

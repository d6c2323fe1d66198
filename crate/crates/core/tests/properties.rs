//! Property tests of the numerical kernels against independent oracles.

use std::f64::consts::PI;
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use minisuper_core::ansatz::{expectation_of, gradient, prepare, AnsatzSpec, Entanglement};
use minisuper_core::model::{build_operators, nariai_mass, ModelConfig, OperatorPair};
use minisuper_core::numerics::{
    eig_hermitian, integrate_adaptive, minimize_bounded, real_roots_cubic, OptimizerSettings,
};
use minisuper_core::pauli::{self, decompose, reconstruct, PauliString};
use minisuper_core::thermo;
use minisuper_core::{Complex64, ComplexMatrix, HermitianOperator};

fn random_hermitian(n: usize, seed: u64) -> HermitianOperator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = ComplexMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    HermitianOperator::new((&a + &a.adjoint()).scale_real(0.5)).unwrap()
}

fn random_state(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|c| c / norm).collect()
}

fn reference_q4() -> &'static OperatorPair {
    static OPS: OnceLock<OperatorPair> = OnceLock::new();
    OPS.get_or_init(|| build_operators(&ModelConfig::reference(4)).unwrap())
}

fn reference_q4_min() -> f64 {
    static MIN: OnceLock<f64> = OnceLock::new();
    *MIN.get_or_init(|| eig_hermitian(&reference_q4().mass_4m).unwrap().eigenvalues[0])
}

/// The circuit as a product of dense gate matrices; qubit 0 is the leftmost factor.
fn dense_circuit(spec: &AnsatzSpec, theta: &[f64]) -> Vec<f64> {
    let q = spec.qubits;
    let id2 = ComplexMatrix::identity(2);
    let ry = |t: f64| {
        let (s, c) = (0.5 * t).sin_cos();
        ComplexMatrix::from_real(2, 2, &[c, -s, s, c]).unwrap()
    };
    let on_qubit = |g: &ComplexMatrix, i: usize| {
        (0..q).fold(ComplexMatrix::identity(1), |acc, k| acc.kron(if k == i { g } else { &id2 }))
    };
    let cx = |c: usize, t: usize| {
        let n = 1 << q;
        let (cb, tb) = (1 << (q - 1 - c), 1 << (q - 1 - t));
        let image = |k: usize| if k & cb != 0 { k ^ tb } else { k };
        ComplexMatrix::from_fn(n, n, |r, col| {
            if image(col) == r {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    };
    let mut u = ComplexMatrix::identity(1 << q);
    for layer in 0..=spec.depth {
        for i in 0..q {
            u = on_qubit(&ry(theta[layer * q + i]), i).matmul(&u);
        }
        if layer < spec.depth {
            for (c, t) in spec.cx_pairs() {
                u = cx(c, t).matmul(&u);
            }
        }
    }
    u.column(0).iter().map(|c| c.re).collect()
}

fn theta_strategy(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-PI..PI, len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn eig_reconstructs_random_hermitian(n in 1usize..24, seed in any::<u64>()) {
        let h = random_hermitian(n, seed);
        let e = eig_hermitian(&h).unwrap();
        prop_assert!(e.reconstruction_error(&h) < 1e-10);
        prop_assert!(e.orthonormality_error() < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let trace: f64 = e.eigenvalues.iter().sum();
        prop_assert!((trace - h.trace().re).abs() < 1e-9 * n as f64);
    }

    #[test]
    fn horizon_roots_satisfy_vieta(frac in 1e-6f64..0.999_999, lambda in 1e-3f64..3.0) {
        let m = frac * nariai_mass(lambda).unwrap();
        let l2 = 3.0 / lambda;
        let (r_neg, r_bh, r_ch) = thermo::cubic_roots(m, lambda).unwrap();
        let scale = l2.sqrt();
        prop_assert!(r_neg < 0.0 && 0.0 < r_bh && r_bh < r_ch);
        prop_assert!((r_neg + r_bh + r_ch).abs() < 1e-12 * scale);
        prop_assert!((r_neg * r_bh + r_neg * r_ch + r_bh * r_ch + l2).abs() < 1e-12 * l2);
        prop_assert!((r_neg * r_bh * r_ch + 2.0 * m * l2).abs() < 1e-12 * l2 * scale);
        // the generic cubic solver is an independent route to the same roots
        let generic = real_roots_cubic(1.0, 0.0, -l2, 2.0 * m * l2).unwrap();
        prop_assert_eq!(generic.len(), 3);
        for (a, b) in generic.iter().zip([r_neg, r_bh, r_ch]) {
            prop_assert!((a - b).abs() < 1e-9 * scale);
        }
    }

    #[test]
    fn pauli_round_trip_is_exact(half in 1usize..=3, seed in any::<u64>()) {
        let q = 2 * half;
        let h = random_hermitian(1 << q, seed);
        let sum = decompose(&h, 0.0).unwrap();
        prop_assert_eq!(sum.len(), 1 << (2 * q));
        prop_assert!(reconstruct(&sum).max_abs_diff(&h) < 1e-10);
    }

    #[test]
    fn term_count_is_monotone_in_threshold(seed in any::<u64>(), t in 1e-6f64..0.5, factor in 1.0f64..100.0) {
        let h = random_hermitian(16, seed);
        let sum = decompose(&h, 0.0).unwrap();
        prop_assert!(sum.count_above(t) >= sum.count_above(t * factor));
        prop_assert_eq!(decompose(&h, t).unwrap().len(), sum.count_above(t));
    }

    #[test]
    fn pauli_strings_are_orthogonal(q in 1usize..=3, a in any::<usize>(), b in any::<usize>()) {
        let n = 1usize << (2 * q);
        let (pa, pb) = (PauliString::from_index(a % n, q), PauliString::from_index(b % n, q));
        let tr = pa.to_matrix().matmul(&pb.to_matrix()).trace();
        let expected = if a % n == b % n { (1 << q) as f64 } else { 0.0 };
        prop_assert!((tr - Complex64::new(expected, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn pauli_expectation_matches_dense(half in 1usize..=2, seed in any::<u64>()) {
        let q = 2 * half;
        let h = random_hermitian(1 << q, seed);
        let psi = random_state(1 << q, seed ^ 0x5eed);
        let sum = decompose(&h, 0.0).unwrap();
        let e = pauli::expectation(&sum, &psi).unwrap();
        prop_assert!((e - h.quadratic_form(&psi)).abs() < 1e-10);
    }

    #[test]
    fn ansatz_matches_dense_circuit(
        q in 1usize..=4,
        depth in 0usize..=3,
        linear in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let ent = if linear { Entanglement::Linear } else { Entanglement::Full };
        let spec = AnsatzSpec::new(q, depth, ent);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let theta: Vec<f64> = (0..spec.parameter_count()).map(|_| rng.random_range(-PI..PI)).collect();
        let state = prepare(&spec, &theta).unwrap();
        prop_assert!((state.norm() - 1.0).abs() < 1e-12);
        prop_assert!(state.to_complex().iter().all(|c| c.im == 0.0));
        let oracle = dense_circuit(&spec, &theta);
        for (a, b) in state.amplitudes().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_shift_matches_central_difference(theta in theta_strategy(16)) {
        let spec = AnsatzSpec::reference(4);
        let op = &reference_q4().mass_4m;
        let g = gradient(&spec, &theta, op).unwrap();
        let h = 1e-5;
        for k in 0..theta.len() {
            let mut t = theta.clone();
            t[k] += h;
            let up = expectation_of(&spec, &t, op).unwrap();
            t[k] -= 2.0 * h;
            let down = expectation_of(&spec, &t, op).unwrap();
            prop_assert!((g[k] - (up - down) / (2.0 * h)).abs() < 1e-6);
        }
    }

    #[test]
    fn energy_is_bounded_by_lowest_eigenvalue(theta in theta_strategy(16)) {
        let spec = AnsatzSpec::reference(4);
        let e = expectation_of(&spec, &theta, &reference_q4().mass_4m).unwrap();
        prop_assert!(e >= reference_q4_min() - 1e-10);
    }

    #[test]
    fn optimizer_trace_is_monotone_and_feasible(
        centre in prop::collection::vec(-3.0f64..3.0, 4),
        weights in prop::collection::vec(0.1f64..10.0, 4),
        start in prop::collection::vec(-2.0f64..2.0, 4),
    ) {
        let f = |x: &[f64]| -> f64 {
            x.iter().zip(&centre).zip(&weights).map(|((x, c), w)| w * (x - c).powi(2) + (x * c).sin()).sum()
        };
        let g = |x: &[f64]| -> Vec<f64> {
            x.iter().zip(&centre).zip(&weights).map(|((x, c), w)| 2.0 * w * (x - c) + c * (x * c).cos()).collect()
        };
        let settings = OptimizerSettings::boxed(4, -2.0, 2.0);
        let m = minimize_bounded(f, g, &start, &settings).unwrap();
        prop_assert!(m.trace.windows(2).all(|w| w[1].1 <= w[0].1));
        prop_assert!(m.x.iter().all(|x| (-2.0..=2.0).contains(x)));
        prop_assert!(m.value <= f(&start));
        prop_assert!((m.value - f(&m.x)).abs() < 1e-12);
    }

    #[test]
    fn quadrature_matches_finer_simpson(
        a in -2.0f64..0.0,
        width in 0.1f64..4.0,
        k in 0.0f64..6.0,
        c in -1.0f64..1.0,
    ) {
        let f = |x: f64| (c * x).exp() * (k * x).cos() + x * x;
        let b = a + width;
        let value = integrate_adaptive(f, a, b, 1e-12).unwrap();
        let simpson = |n: usize| {
            let h = (b - a) / n as f64;
            let inner: f64 = (1..n).map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
            (f(a) + f(b) + inner) * h / 3.0
        };
        let (coarse, fine) = (simpson(1000), simpson(4000));
        // Richardson extrapolation of the two Simpson estimates
        let oracle = fine + (fine - coarse) / 255.0;
        prop_assert!((value - oracle).abs() <= 1e-10 * (1.0 + oracle.abs()));
    }
}

#[test]
fn pauli_expectation_matches_dense_at_eight_qubits() {
    let ops = build_operators(&ModelConfig::reference(8)).unwrap();
    let sum = decompose(&ops.mass_4m, 0.0).unwrap();
    for seed in 0..4 {
        let psi = random_state(256, seed);
        let e = pauli::expectation(&sum, &psi).unwrap();
        let dense = ops.mass_4m.quadratic_form(&psi);
        assert!((e - dense).abs() < 1e-9 * (1.0 + dense.abs()), "{e} vs {dense}");
    }
}

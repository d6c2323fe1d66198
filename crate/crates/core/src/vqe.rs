//! Multi-start variational minimization of `<psi(θ)|O|psi(θ)>`.

use std::f64::consts::PI;
use std::io::{self, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{gradient, prepare, AnsatzSpec, Observable, PARAMETER_BOUND};
use crate::error::{Error, Result};
use crate::model::{build_operators, ModelConfig};
use crate::numerics::{minimize_bounded, OptimizerSettings};

pub const DEFAULT_STARTS: usize = 10;

/// Seeds `0, 1, …, n−1`.
pub fn default_seeds(n: usize) -> Vec<u64> {
    (0..n as u64).collect()
}

/// Box `[−2π, 2π]` per angle, 500 iterations, gradient tolerance 1e-9.
pub fn default_settings(spec: &AnsatzSpec) -> OptimizerSettings {
    OptimizerSettings::boxed(spec.parameter_count(), -PARAMETER_BOUND, PARAMETER_BOUND)
}

/// Initial angles for one start, uniform on `[−π, π]` from a ChaCha8 stream.
pub fn initial_theta(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.random_range(-PI..=PI)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum StartOutcome {
    Finished {
        theta: Vec<f64>,
        value: f64,
        iterations: usize,
        converged: bool,
    },
    Failed {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StartRecord {
    pub seed: u64,
    pub initial_theta: Vec<f64>,
    pub outcome: StartOutcome,
    /// Every objective evaluation in call order, `(index, value)`.
    pub evaluations: Vec<(usize, f64)>,
    pub gradient_evaluations: usize,
}

impl StartRecord {
    pub fn final_value(&self) -> Option<f64> {
        match &self.outcome {
            StartOutcome::Finished { value, .. } => Some(*value),
            StartOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VqeRun {
    /// `None` when the run minimized a caller-supplied operator.
    pub config: Option<ModelConfig>,
    pub spec: AnsatzSpec,
    pub settings: OptimizerSettings,
    pub seeds: Vec<u64>,
    pub best_value: f64,
    pub best_theta: Vec<f64>,
    pub best_start: usize,
    pub starts: Vec<StartRecord>,
}

impl VqeRun {
    pub fn evaluations(&self) -> usize {
        self.starts.iter().map(|s| s.evaluations.len()).sum()
    }

    pub fn failed_starts(&self) -> usize {
        self.starts.iter().filter(|s| s.final_value().is_none()).count()
    }

    /// Rows `(start_id, eval_index, value, best_so_far)`.
    pub fn convergence_rows(&self) -> Vec<(usize, usize, f64, f64)> {
        let mut rows = Vec::with_capacity(self.evaluations());
        for (id, start) in self.starts.iter().enumerate() {
            let mut best = f64::INFINITY;
            for &(idx, value) in &start.evaluations {
                best = best.min(value);
                rows.push((id, idx, value, best));
            }
        }
        rows
    }

    pub fn write_convergence_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "start_id,eval_index,value,best_so_far")?;
        for (id, idx, value, best) in self.convergence_rows() {
            writeln!(w, "{id},{idx},{},{}", crate::fmt_f64(value), crate::fmt_f64(best))?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VqeSummary {
    pub qubits: usize,
    pub lambda: f64,
    pub pauli_terms: usize,
    pub exact_min: f64,
    pub vqe_best: f64,
    pub gap: f64,
    pub seeds: Vec<u64>,
    pub evaluations: usize,
}

impl VqeSummary {
    pub fn new(run: &VqeRun, config: &ModelConfig, pauli_terms: usize, exact_min: f64) -> Self {
        Self {
            qubits: config.qubits,
            lambda: config.lambda,
            pauli_terms,
            exact_min,
            vqe_best: run.best_value,
            gap: run.best_value - exact_min,
            seeds: run.seeds.clone(),
            evaluations: run.evaluations(),
        }
    }
}

fn run_start(spec: &AnsatzSpec, op: &dyn Observable, settings: &OptimizerSettings, seed: u64) -> StartRecord {
    let theta0 = initial_theta(seed, spec.parameter_count());
    let mut evaluations = Vec::new();
    let mut gradient_evaluations = 0;
    let result = minimize_bounded(
        |theta| {
            let value = prepare(spec, theta)
                .map(|s| op.expectation_real(s.amplitudes()))
                .unwrap_or(f64::NAN);
            evaluations.push((evaluations.len(), value));
            value
        },
        |theta| {
            gradient_evaluations += 1;
            gradient(spec, theta, op).unwrap_or_else(|_| vec![f64::NAN; theta.len()])
        },
        &theta0,
        settings,
    );
    let outcome = match result {
        Ok(m) => StartOutcome::Finished {
            theta: m.x,
            value: m.value,
            iterations: m.iterations,
            converged: m.converged,
        },
        Err(e) => StartOutcome::Failed { reason: e.to_string() },
    };
    StartRecord {
        seed,
        initial_theta: theta0,
        outcome,
        evaluations,
        gradient_evaluations,
    }
}

/// Minimizes `op` from one start per seed. Starts run in parallel; the best
/// start is the lowest final value, ties going to the earlier seed.
pub fn run_vqe_observable(
    op: &dyn Observable,
    spec: &AnsatzSpec,
    settings: &OptimizerSettings,
    seeds: &[u64],
) -> Result<VqeRun> {
    spec.validate()?;
    settings.validate()?;
    if settings.dimension() != spec.parameter_count() {
        return Err(Error::Settings(format!(
            "optimizer bounds have {} entries, ansatz has {} parameters",
            settings.dimension(),
            spec.parameter_count()
        )));
    }
    if op.dim() != spec.dim() {
        return Err(Error::Dimension(format!(
            "operator dimension {} does not match {} qubits",
            op.dim(),
            spec.qubits
        )));
    }
    if seeds.is_empty() {
        return Err(Error::Settings("at least one seed is required".into()));
    }

    let starts: Vec<StartRecord> = seeds
        .par_iter()
        .map(|&seed| run_start(spec, op, settings, seed))
        .collect();

    let mut best: Option<(usize, f64)> = None;
    for (i, s) in starts.iter().enumerate() {
        if let Some(v) = s.final_value() {
            if best.is_none_or(|(_, b)| v < b) {
                best = Some((i, v));
            }
        }
    }
    let (best_start, best_value) = best.ok_or(Error::AllStartsFailed(seeds.len()))?;
    let best_theta = match &starts[best_start].outcome {
        StartOutcome::Finished { theta, .. } => theta.clone(),
        StartOutcome::Failed { .. } => unreachable!(),
    };
    Ok(VqeRun {
        config: None,
        spec: *spec,
        settings: settings.clone(),
        seeds: seeds.to_vec(),
        best_value,
        best_theta,
        best_start,
        starts,
    })
}

/// Minimizes the dense mass operator `4M` built from `config`.
pub fn run_vqe(
    config: &ModelConfig,
    spec: &AnsatzSpec,
    settings: &OptimizerSettings,
    seeds: &[u64],
) -> Result<VqeRun> {
    if spec.qubits != config.qubits {
        return Err(Error::Settings(format!(
            "ansatz acts on {} qubits, model on {}",
            spec.qubits, config.qubits
        )));
    }
    let ops = build_operators(config)?;
    let mut run = run_vqe_observable(&ops.mass_4m, spec, settings, seeds)?;
    run.config = Some(*config);
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliSum;

    fn small_settings(spec: &AnsatzSpec) -> OptimizerSettings {
        default_settings(spec).with_max_iterations(60)
    }

    #[test]
    fn seeded_angles_are_reproducible_and_in_range() {
        let a = initial_theta(7, 16);
        assert_eq!(a, initial_theta(7, 16));
        assert_ne!(a, initial_theta(8, 16));
        assert!(a.iter().all(|t| t.abs() <= PI));
    }

    #[test]
    fn identity_operator_gives_one() {
        let spec = AnsatzSpec::reference(2);
        let id = PauliSum::identity(2);
        let run = run_vqe_observable(&id, &spec, &small_settings(&spec), &default_seeds(3)).unwrap();
        assert!((run.best_value - 1.0).abs() < 1e-12);
        assert_eq!(run.failed_starts(), 0);
    }

    #[test]
    fn single_qubit_z_reaches_minus_one() {
        let spec = AnsatzSpec::new(1, 0, Default::default());
        let z = PauliSum::from_terms(1, &[("Z", 1.0)]).unwrap();
        let run = run_vqe_observable(&z, &spec, &small_settings(&spec), &[1, 2]).unwrap();
        assert!((run.best_value + 1.0).abs() < 1e-10);
    }

    #[test]
    fn convergence_csv_is_monotone_and_deterministic() {
        let config = ModelConfig::reference(2);
        let spec = AnsatzSpec::reference(2);
        let settings = small_settings(&spec);
        let run = run_vqe(&config, &spec, &settings, &[3, 4]).unwrap();
        let rows = run.convergence_rows();
        for w in rows.windows(2) {
            if w[0].0 == w[1].0 {
                assert!(w[1].3 <= w[0].3);
            }
        }
        let mut a = Vec::new();
        run.write_convergence_csv(&mut a).unwrap();
        let mut b = Vec::new();
        run_vqe(&config, &spec, &settings, &[3, 4])
            .unwrap()
            .write_convergence_csv(&mut b)
            .unwrap();
        assert_eq!(a, b);
        let best_final = run.starts[run.best_start].evaluations.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
        assert_eq!(best_final, run.best_value);
    }

    #[test]
    fn mismatched_inputs_are_rejected() {
        let config = ModelConfig::reference(4);
        let spec = AnsatzSpec::reference(2);
        assert!(matches!(
            run_vqe(&config, &spec, &default_settings(&spec), &[0]),
            Err(Error::Settings(_))
        ));
        let spec4 = AnsatzSpec::reference(4);
        assert!(run_vqe(&config, &spec4, &default_settings(&spec), &[0]).is_err());
        assert!(run_vqe(&config, &spec4, &default_settings(&spec4), &[]).is_err());
    }
}

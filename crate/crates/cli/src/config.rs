//! JSON run configuration and flag overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};

use minisuper_core::ansatz::{AnsatzSpec, Entanglement, PARAMETER_BOUND};
use minisuper_core::basis::BasisKind;
use minisuper_core::model::{default_lambda, ModelConfig};
use minisuper_core::pauli::DEFAULT_THRESHOLD;
use minisuper_core::spectrum::Method;
use minisuper_core::vqe::{default_seeds, DEFAULT_STARTS};
use minisuper_core::wavefn::{Axis, WkbForm};
use minisuper_core::OptimizerSettings;

use crate::CliError;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub lambda: Option<f64>,
    pub qubits: Option<usize>,
    #[serde(default)]
    pub basis: BasisKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnsatzSection {
    pub depth: usize,
    pub entanglement: Entanglement,
}

impl Default for AnsatzSection {
    fn default() -> Self {
        Self {
            depth: 3,
            entanglement: Entanglement::Full,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerSection {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub memory_pairs: usize,
    /// Same box for every angle.
    pub bounds: [f64; 2],
}

impl Default for OptimizerSection {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-9,
            memory_pairs: 10,
            bounds: [-PARAMETER_BOUND, PARAMETER_BOUND],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VqeSection {
    pub seeds: Vec<u64>,
}

impl Default for VqeSection {
    fn default() -> Self {
        Self {
            seeds: default_seeds(DEFAULT_STARTS),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorChoice {
    #[default]
    Mass,
    Constraint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PauliSection {
    pub threshold: f64,
    pub operator: OperatorChoice,
}

impl Default for PauliSection {
    fn default() -> Self {
        Self {
            threshold: DEFAULT_THRESHOLD,
            operator: OperatorChoice::Mass,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpectrumSection {
    pub method: Method,
    /// Method default when absent.
    pub tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WavefnSection {
    pub grid: Axis,
    pub wkb_mass: f64,
    pub wkb_form: WkbForm,
    pub a_axis: Axis,
    pub b_axis: Axis,
}

impl Default for WavefnSection {
    fn default() -> Self {
        Self {
            grid: Axis::DEFAULT,
            wkb_mass: 0.5,
            wkb_form: WkbForm::Printed,
            a_axis: Axis {
                lo: -5.0,
                hi: 5.0,
                samples: 101,
            },
            b_axis: Axis {
                lo: 0.1,
                hi: 20.0,
                samples: 200,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridsSection {
    /// Contour level; the Nariai mass when absent.
    pub mass: Option<f64>,
    pub potential_axis: Axis,
    pub p_axis: Axis,
    pub b_axis: Axis,
    pub x_axis: Axis,
}

impl Default for GridsSection {
    fn default() -> Self {
        Self {
            mass: None,
            potential_axis: Axis {
                lo: -8.0,
                hi: 8.0,
                samples: 1601,
            },
            p_axis: Axis {
                lo: -10.0,
                hi: 10.0,
                samples: 201,
            },
            b_axis: Axis {
                lo: 0.1,
                hi: 20.0,
                samples: 200,
            },
            x_axis: Axis::DEFAULT,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub model: ModelSection,
    pub ansatz: AnsatzSection,
    pub optimizer: OptimizerSection,
    pub vqe: VqeSection,
    pub pauli: PauliSection,
    pub spectrum: SpectrumSection,
    pub wavefn: WavefnSection,
    pub grids: GridsSection,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        let config = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        Ok((config, bytes))
    }
}

/// Flag values that override the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub qubits: Option<usize>,
    pub threshold: Option<f64>,
}

/// Fully resolved settings; serialized into the manifest for replay.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Resolved {
    pub model: ModelConfig,
    pub ansatz: AnsatzSpec,
    pub optimizer: OptimizerSettings,
    pub seeds: Vec<u64>,
    pub pauli: PauliSection,
    pub spectrum_method: Method,
    pub spectrum_tol: f64,
    pub wavefn: WavefnSection,
    pub grids: GridsSection,
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

impl Resolved {
    /// `--seed N` replaces the seed list with `N, N+1, …` of the same length.
    pub fn new(file: FileConfig, over: &Overrides) -> Result<Self, CliError> {
        let qubits = over.qubits.or(file.model.qubits).unwrap_or(4);
        let lambda = over.lambda.or(file.model.lambda).unwrap_or_else(|| default_lambda(qubits));
        let model = ModelConfig::new(lambda, qubits, file.model.basis);
        model.validate().map_err(usage)?;

        let ansatz = AnsatzSpec::new(qubits, file.ansatz.depth, file.ansatz.entanglement);
        ansatz.validate().map_err(usage)?;

        let o = &file.optimizer;
        let optimizer = OptimizerSettings::boxed(ansatz.parameter_count(), o.bounds[0], o.bounds[1])
            .with_max_iterations(o.max_iterations)
            .with_gradient_tolerance(o.tolerance)
            .with_memory_pairs(o.memory_pairs);
        optimizer.validate().map_err(usage)?;

        let mut seeds = file.vqe.seeds;
        if let Some(base) = over.seed {
            let n = seeds.len().max(1) as u64;
            seeds = (base..base + n).collect();
        }
        if seeds.is_empty() {
            return Err(CliError::Usage("vqe.seeds must not be empty".into()));
        }

        let mut pauli = file.pauli;
        if let Some(t) = over.threshold {
            pauli.threshold = t;
        }
        if !(pauli.threshold >= 0.0) {
            return Err(CliError::Usage(format!("threshold must be non-negative, got {}", pauli.threshold)));
        }

        let spectrum_method = file.spectrum.method;
        let spectrum_tol = file.spectrum.tol.unwrap_or(spectrum_method.default_tol());
        if !(spectrum_tol > 0.0) {
            return Err(CliError::Usage(format!("spectrum.tol must be positive, got {spectrum_tol}")));
        }
        for axis in [&file.wavefn.grid, &file.wavefn.a_axis, &file.wavefn.b_axis] {
            axis.validate().map_err(usage)?;
        }
        let g = &file.grids;
        for axis in [&g.potential_axis, &g.p_axis, &g.b_axis, &g.x_axis] {
            axis.validate().map_err(usage)?;
        }

        Ok(Self {
            model,
            ansatz,
            optimizer,
            seeds,
            pauli,
            spectrum_method,
            spectrum_tol,
            wavefn: file.wavefn,
            grids: file.grids,
        })
    }
}

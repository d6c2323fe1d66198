use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use minisuper_core::model::{build_operators, nariai_mass, potential_sd, potential_sd_peak};
use minisuper_core::pauli::decompose;
use minisuper_core::spectrum::{constrained_spectrum, full_spectrum};
use minisuper_core::thermo::{self, partition_function};
use minisuper_core::vqe::{run_vqe, VqeSummary};
use minisuper_core::wavefn::{self, reshape_state};

use crate::config::{OperatorChoice, Resolved};
use crate::CliError;

/// Summary printed to stdout plus the files written into the output directory.
pub struct Outcome {
    pub summary: Value,
    pub outputs: Vec<String>,
}

fn create(dir: &Path, name: &str, outputs: &mut Vec<String>) -> Result<BufWriter<File>, CliError> {
    let path = dir.join(name);
    let f = File::create(&path).map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))?;
    outputs.push(name.to_string());
    Ok(BufWriter::new(f))
}

fn write_with(
    dir: &Path,
    name: &str,
    outputs: &mut Vec<String>,
    body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
) -> Result<(), CliError> {
    let mut w = create(dir, name, outputs)?;
    body(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(format!("writing {name}: {e}")))
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T, outputs: &mut Vec<String>) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    write_with(dir, name, outputs, |w| writeln!(w, "{text}"))
}

pub fn decompose_cmd(r: &Resolved, dir: &Path) -> Result<Outcome, CliError> {
    let ops = build_operators(&r.model)?;
    let op = match r.pauli.operator {
        OperatorChoice::Mass => &ops.mass_4m,
        OperatorChoice::Constraint => &ops.hamiltonian_2bh,
    };
    let sum = decompose(op, r.pauli.threshold)?;
    let mut outputs = Vec::new();
    write_with(dir, "pauli_terms.csv", &mut outputs, |w| sum.write_csv(w))?;
    let summary = json!({
        "qubits": r.model.qubits,
        "lambda": r.model.lambda,
        "operator": r.pauli.operator,
        "threshold": r.pauli.threshold,
        "term_count": sum.len(),
    });
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    Ok(Outcome { summary, outputs })
}

pub fn vqe_cmd(r: &Resolved, dir: &Path) -> Result<Outcome, CliError> {
    let ops = build_operators(&r.model)?;
    let terms = decompose(&ops.mass_4m, r.pauli.threshold)?.len();
    let exact_min = full_spectrum(&ops.mass_4m)?.eigenvalues[0];
    let run = run_vqe(&r.model, &r.ansatz, &r.optimizer, &r.seeds)?;
    let mut outputs = Vec::new();
    write_with(dir, "convergence.csv", &mut outputs, |w| run.write_convergence_csv(w))?;
    let summary = VqeSummary::new(&run, &r.model, terms, exact_min);
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    write_json(dir, "starts.json", &run.starts, &mut outputs)?;
    let summary = serde_json::to_value(&summary).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Outcome { summary, outputs })
}

pub fn spectrum_cmd(r: &Resolved, dir: &Path) -> Result<Outcome, CliError> {
    let ops = build_operators(&r.model)?;
    let s = constrained_spectrum(&ops, r.spectrum_method, r.spectrum_tol)?;
    let mut outputs = Vec::new();
    write_json(dir, "spectrum.json", &s, &mut outputs)?;
    write_with(dir, "eigenvectors.csv", &mut outputs, |w| s.write_eigenvectors_csv(w))?;
    let summary = json!({
        "qubits": r.model.qubits,
        "lambda": r.model.lambda,
        "method": s.method,
        "tol": s.tol,
        "eigenvalues": s.eigenvalues,
        "residuals": s.residuals,
        "separation_factor": s.separation_factor(),
    });
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    Ok(Outcome { summary, outputs })
}

/// Parses `a:b:n`.
pub fn parse_sweep(text: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("--sweep expects a:b:n, got '{text}'"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let a = parts[0].parse().map_err(|_| bad())?;
    let b = parts[1].parse().map_err(|_| bad())?;
    let n = parts[2].parse().map_err(|_| bad())?;
    Ok((a, b, n))
}

pub fn thermo_cmd(r: &Resolved, dir: &Path, mass: Option<f64>, sweep: Option<&str>) -> Result<Outcome, CliError> {
    let lambda = r.model.lambda;
    let m_n = nariai_mass(lambda)?;
    let mut outputs = Vec::new();
    let mut summary = json!({ "lambda": lambda, "nariai_mass": m_n });

    if let Some(m) = mass {
        let p = thermo::thermo_point(m, lambda)?;
        write_json(dir, "thermo_point.json", &p, &mut outputs)?;
        summary["point"] = serde_json::to_value(p).map_err(|e| CliError::Io(e.to_string()))?;
    }
    if sweep.is_some() || mass.is_none() {
        let (a, b, n) = match sweep {
            Some(s) => parse_sweep(s)?,
            None => (0.0, m_n, 100),
        };
        let points = thermo::sweep(lambda, a, b, n)?;
        write_with(dir, "thermo_sweep.csv", &mut outputs, |w| thermo::write_sweep_csv(&points, w))?;
        summary["sweep"] = json!({ "from": a, "to": b, "points": points.len() });
    }
    let z: Vec<Value> = [-5.0, 0.0, 5.0, 50.0]
        .iter()
        .map(|&beta| partition_function(beta, 1e-10).map(|z| json!({ "beta": beta, "z": z })))
        .collect::<Result<_, _>>()?;
    summary["partition_function_unit_ell"] = Value::Array(z);
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    Ok(Outcome { summary, outputs })
}

pub fn wavefn_cmd(r: &Resolved, dir: &Path, mass: Option<f64>) -> Result<Outcome, CliError> {
    let ops = build_operators(&r.model)?;
    let s = constrained_spectrum(&ops, r.spectrum_method, r.spectrum_tol)?;
    let axis = &r.wavefn.grid;
    let mut outputs = Vec::new();
    let mut states = Vec::new();
    for (k, psi) in s.eigenvectors.iter().enumerate() {
        let coeffs = reshape_state(psi, r.model.qubits)?;
        let field = wavefn::wavefunction_grid(&coeffs, axis, axis)?;
        write_with(dir, &format!("state_{k}.csv"), &mut outputs, |w| field.write_csv(w))?;
        states.push(json!({
            "index": k,
            "mass_eigenvalue": s.eigenvalues[k],
            "residual": s.residuals[k],
            "coefficient_norm": coeffs.norm_sqr(),
            "grid_norm": wavefn::grid_norm_sqr(&field, axis, axis),
            "parity_defect": wavefn::parity_defect(&field),
        }));
    }
    let wkb_mass = mass.unwrap_or(r.wavefn.wkb_mass);
    let samples = wavefn::wkb_grid(wkb_mass, r.model.lambda, r.wavefn.wkb_form, &r.wavefn.a_axis, &r.wavefn.b_axis)?;
    write_with(dir, "wkb.csv", &mut outputs, |w| wavefn::write_wkb_csv(&samples, w))?;
    let horizons = thermo::horizons(wkb_mass, r.model.lambda).ok();
    let summary = json!({
        "qubits": r.model.qubits,
        "lambda": r.model.lambda,
        "states": states,
        "wkb": {
            "mass": wkb_mass,
            "form": r.wavefn.wkb_form,
            "samples": samples.len(),
            "allowed": samples.iter().filter(|s| s.region == wavefn::Region::Allowed).count(),
            "horizons": horizons,
        },
    });
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    Ok(Outcome { summary, outputs })
}

pub fn grids_cmd(r: &Resolved, dir: &Path, mass: Option<f64>) -> Result<Outcome, CliError> {
    let lambda = r.model.lambda;
    let g = &r.grids;
    let level = match mass.or(g.mass) {
        Some(m) => m,
        None => nariai_mass(lambda)?,
    };
    let mut outputs = Vec::new();
    let potential = wavefn::potential_grid(lambda, &g.potential_axis)?;
    write_with(dir, "potential.csv", &mut outputs, |w| wavefn::write_potential_csv(&potential, w))?;
    let ab = wavefn::contour_grid_ab(level, lambda, &g.p_axis, &g.b_axis)?;
    write_with(dir, "contour_ab.csv", &mut outputs, |w| ab.write_csv(w))?;
    let uv = wavefn::contour_grid_uv(level, lambda, &g.p_axis, &g.x_axis)?;
    write_with(dir, "contour_uv.csv", &mut outputs, |w| uv.write_csv(w))?;
    let peak = potential_sd_peak(lambda).ok();
    let summary = json!({
        "lambda": lambda,
        "level_mass": level,
        "v_sd_grid_max": potential.iter().map(|s| s.v_sd).fold(f64::NEG_INFINITY, f64::max),
        "v_sd_peak": peak.map(|x| json!({ "x": x, "value": potential_sd(x, lambda) })),
    });
    write_json(dir, "summary.json", &summary, &mut outputs)?;
    Ok(Outcome { summary, outputs })
}

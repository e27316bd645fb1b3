//! Scenario files: a JSON document describing one simulation setup.
//!
//! ```json
//! {
//!   "name": "example1",
//!   "mode": "compare",
//!   "hamiltonian": { "builder": "swap" },
//!   "projectors": [["u"]],
//!   "selected_index": 0,
//!   "gamma": 5.0, "tau": 0.04,
//!   "initial_sys": [{ "population": 0.2 }],
//!   "initial_pr": "u",
//!   "t_max": 10.0
//! }
//! ```

use std::fs;
use std::path::Path;

use log::info;
use serde::Deserialize;
use stroblim_core::experiments::{ClosedForm, LabeledState, Metric, Output, Scenario};
use stroblim_core::linalg::{from_bloch, ComplexMatrix, Ket, C64, DEFAULT_TOL};
use stroblim_core::model::{
    heisenberg3_hamiltonian, qubit_from_population, qubit_ket, swap_hamiltonian, FieldConfig,
    HamiltonianSpec, InitialState, MeasurementSpec, Projector,
};
use stroblim_core::trajectory::Method;

use crate::error::CliError;

pub const DEFAULT_TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Selective,
    Nonselective,
    LimitOnly,
    Compare,
}

/// [re, im]
pub type ComplexEntry = [f64; 2];

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermFile {
    pub system: Vec<Vec<ComplexEntry>>,
    pub probe: Vec<Vec<ComplexEntry>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianFile {
    pub builder: Option<String>,
    pub field: Option<String>,
    pub terms: Option<Vec<TermFile>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum KetFile {
    Label(String),
    Amplitudes(Vec<ComplexEntry>),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateObject {
    pub label: Option<String>,
    pub population: Option<f64>,
    pub basis: Option<String>,
    pub superposition: Option<Vec<String>>,
    pub ket: Option<Vec<ComplexEntry>>,
    pub bloch: Option<[f64; 3]>,
    pub density: Option<Vec<Vec<ComplexEntry>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum StateFile {
    Label(String),
    Object(StateObject),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T: Clone> OneOrMany<T> {
    fn to_vec(&self) -> Vec<T> {
        match self {
            OneOrMany::One(x) => vec![x.clone()],
            OneOrMany::Many(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesFile {
    pub max_deviation: Option<f64>,
    pub metric: Option<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub name: String,
    pub mode: Option<Mode>,
    pub hamiltonian: HamiltonianFile,
    pub projectors: Vec<Vec<KetFile>>,
    pub selected_index: Option<usize>,
    pub gamma: Option<f64>,
    pub tau: Option<f64>,
    pub omega: Option<f64>,
    pub initial_sys: OneOrMany<StateFile>,
    pub initial_pr: StateFile,
    pub t_max: f64,
    pub grid_points: Option<usize>,
    pub outputs: Option<Vec<String>>,
    pub methods: Option<Vec<String>>,
    pub tolerances: Option<TolerancesFile>,
}

/// Parsed and validated scenario.
#[derive(Clone, Debug)]
pub struct LoadedScenario {
    pub mode: Mode,
    pub scenario: Scenario,
}

fn schema(key: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Schema(format!("{key}: {msg}"))
}

pub fn load(path: &Path) -> Result<LoadedScenario, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read scenario {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Schema(msg) => CliError::Schema(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse(text: &str) -> Result<LoadedScenario, CliError> {
    let file: ScenarioFile = serde_json::from_str(text)
        .map_err(|e| CliError::Schema(format!("line {} column {}: {e}", e.line(), e.column())))?;
    build(&file)
}

fn complex_matrix(key: &str, rows: &[Vec<ComplexEntry>]) -> Result<ComplexMatrix, CliError> {
    let rows: Vec<Vec<C64>> = rows
        .iter()
        .map(|r| r.iter().map(|&[re, im]| C64::new(re, im)).collect())
        .collect();
    ComplexMatrix::from_rows(&rows).map_err(|e| schema(key, e))
}

fn ket_from_entries(key: &str, entries: &[ComplexEntry]) -> Result<Ket, CliError> {
    Ok(Ket::new(
        entries.iter().map(|&[re, im]| C64::new(re, im)).collect(),
    ))
    .and_then(|k: Ket| {
        if entries.is_empty() {
            Err(schema(key, "empty ket"))
        } else {
            Ok(k)
        }
    })
}

fn label_ket(key: &str, label: &str) -> Result<Ket, CliError> {
    qubit_ket(label).map_err(|e| schema(key, e))
}

fn probe_ket(key: &str, k: &KetFile) -> Result<Ket, CliError> {
    match k {
        KetFile::Label(l) => label_ket(key, l),
        KetFile::Amplitudes(a) => ket_from_entries(key, a),
    }
}

fn hamiltonian(file: &HamiltonianFile, gamma: f64) -> Result<HamiltonianSpec, CliError> {
    match (&file.builder, &file.terms) {
        (Some(_), Some(_)) => Err(schema(
            "hamiltonian",
            "give either 'builder' or 'terms', not both",
        )),
        (None, None) => Err(schema("hamiltonian", "missing 'builder' or 'terms'")),
        (Some(b), None) => match b.as_str() {
            "swap" => {
                if file.field.is_some() {
                    return Err(schema("hamiltonian.field", "not used by the swap builder"));
                }
                Ok(swap_hamiltonian(gamma))
            }
            "heisenberg3" => {
                let field = match file.field.as_deref() {
                    Some("local_xyz") => FieldConfig::LocalXyz,
                    Some("global_z") => FieldConfig::GlobalZ,
                    Some(other) => {
                        return Err(schema(
                            "hamiltonian.field",
                            format!("unknown field '{other}' (expected local_xyz or global_z)"),
                        ))
                    }
                    None => return Err(schema("hamiltonian.field", "required for heisenberg3")),
                };
                Ok(heisenberg3_hamiltonian(gamma, field))
            }
            other => Err(schema(
                "hamiltonian.builder",
                format!("unknown builder '{other}' (expected swap or heisenberg3)"),
            )),
        },
        (None, Some(terms)) => {
            if terms.is_empty() {
                return Err(schema("hamiltonian.terms", "at least one term is required"));
            }
            let parsed = terms
                .iter()
                .enumerate()
                .map(|(k, t)| {
                    Ok((
                        complex_matrix(&format!("hamiltonian.terms[{k}].system"), &t.system)?,
                        complex_matrix(&format!("hamiltonian.terms[{k}].probe"), &t.probe)?,
                    ))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            HamiltonianSpec::new(gamma, parsed).map_err(|e| schema("hamiltonian.terms", e))
        }
    }
}

fn parameters(file: &ScenarioFile) -> Result<(f64, f64, f64), CliError> {
    for (key, v) in [
        ("gamma", file.gamma),
        ("tau", file.tau),
        ("omega", file.omega),
    ] {
        if let Some(x) = v {
            if !(x > 0.0 && x.is_finite()) {
                return Err(schema(key, format!("must be positive and finite, got {x}")));
            }
        }
    }
    match (file.gamma, file.tau, file.omega) {
        (Some(g), Some(t), Some(o)) => Ok((g, t, o)),
        (Some(g), Some(t), None) => Ok((g, t, g * g * t)),
        (Some(g), None, Some(o)) => Ok((g, o / (g * g), o)),
        (None, Some(t), Some(o)) => Ok(((o / t).sqrt(), t, o)),
        _ => Err(schema(
            "gamma/tau/omega",
            "two of the three parameters are required",
        )),
    }
}

fn state(
    key: &str,
    s: &StateFile,
    dim: usize,
) -> Result<(Option<String>, ComplexMatrix), CliError> {
    let obj = match s {
        StateFile::Label(l) => StateObject {
            basis: Some(l.clone()),
            ..Default::default()
        },
        StateFile::Object(o) => o.clone(),
    };
    let given = [
        obj.population.is_some(),
        obj.basis.is_some(),
        obj.superposition.is_some(),
        obj.ket.is_some(),
        obj.bloch.is_some(),
        obj.density.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if given != 1 {
        return Err(schema(
            key,
            "exactly one of population, basis, superposition, ket, bloch, density is required",
        ));
    }
    let normalize = |k: Ket| -> Result<Ket, CliError> {
        let n = k.norm();
        if (n - 1.0).abs() > DEFAULT_TOL {
            info!("{key}: normalizing ket of norm {n}");
        }
        k.normalized().ok_or_else(|| schema(key, "zero vector"))
    };
    let rho = if let Some(p) = obj.population {
        if !(0.0..=1.0).contains(&p) {
            return Err(schema(
                key,
                format!("population must lie in [0, 1], got {p}"),
            ));
        }
        qubit_from_population(p).projector()
    } else if let Some(b) = &obj.basis {
        label_ket(key, b)?.projector()
    } else if let Some(labels) = &obj.superposition {
        let first = labels
            .first()
            .ok_or_else(|| schema(key, "empty superposition"))?;
        let mut sum = label_ket(key, first)?;
        for l in &labels[1..] {
            let k = label_ket(key, l)?;
            if k.dim() != sum.dim() {
                return Err(schema(key, "superposition labels have different lengths"));
            }
            sum = sum.add(&k);
        }
        normalize(sum)?.projector()
    } else if let Some(k) = &obj.ket {
        normalize(ket_from_entries(key, k)?)?.projector()
    } else if let Some(r) = obj.bloch {
        if r.iter().map(|x| x * x).sum::<f64>() > 1.0 + DEFAULT_TOL {
            return Err(schema(key, "Bloch vector lies outside the unit ball"));
        }
        from_bloch(r)
    } else {
        complex_matrix(key, obj.density.as_ref().expect("checked above"))?
    };
    if rho.dim() != dim {
        return Err(schema(
            key,
            format!("state has dimension {}, expected {dim}", rho.dim()),
        ));
    }
    if !rho.is_density(DEFAULT_TOL) {
        return Err(schema(key, "not a density matrix"));
    }
    let label = obj.label.clone().or_else(|| match s {
        StateFile::Label(l) => Some(l.clone()),
        StateFile::Object(o) => o.population.map(|p| format!("alpha2={p}")),
    });
    Ok((label, rho))
}

pub fn build(file: &ScenarioFile) -> Result<LoadedScenario, CliError> {
    if file.name.is_empty() || file.name.contains(['/', '\\']) {
        return Err(schema("name", "must be a non-empty file-name-safe string"));
    }
    let (gamma, tau, omega) = parameters(file)?;
    let ham = hamiltonian(&file.hamiltonian, gamma)?;
    let dims = ham.dims();

    if file.projectors.is_empty() {
        return Err(schema("projectors", "at least one projector is required"));
    }
    let projectors = file
        .projectors
        .iter()
        .enumerate()
        .map(|(i, kets)| {
            let key = format!("projectors[{i}]");
            let kets = kets
                .iter()
                .map(|k| probe_ket(&key, k))
                .collect::<Result<Vec<_>, _>>()?;
            Projector::from_kets(&kets).map_err(|e| schema(&key, e))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let measurement = MeasurementSpec::new(projectors, file.selected_index)
        .map_err(|e| schema("projectors", e))?;
    if measurement.dim() != dims.pr {
        return Err(schema(
            "projectors",
            format!(
                "projectors act on dimension {}, the probe has {}",
                measurement.dim(),
                dims.pr
            ),
        ));
    }

    let mode = file.mode.unwrap_or(Mode::Compare);
    match (mode, file.selected_index) {
        (Mode::Selective, None) => {
            return Err(schema("selected_index", "required for mode 'selective'"))
        }
        (Mode::Nonselective, Some(_)) => {
            return Err(schema(
                "selected_index",
                "must be absent for mode 'nonselective'",
            ))
        }
        _ => {}
    }

    let (_, rho_pr) = state("initial_pr", &file.initial_pr, dims.pr)?;
    let entries = file.initial_sys.to_vec();
    if entries.is_empty() {
        return Err(schema("initial_sys", "at least one state is required"));
    }
    let mut initial_states = Vec::with_capacity(entries.len());
    for (k, entry) in entries.iter().enumerate() {
        let key = format!("initial_sys[{k}]");
        let (label, rho_sys) = state(&key, entry, dims.sys)?;
        let label = label.unwrap_or_else(|| format!("s{k}"));
        if label.contains([',', '"', '\n']) {
            return Err(schema(
                &key,
                "labels may not contain commas, quotes or newlines",
            ));
        }
        if initial_states
            .iter()
            .any(|s: &LabeledState| s.label == label)
        {
            return Err(schema(&key, format!("duplicate label '{label}'")));
        }
        let state = InitialState::new(rho_sys, rho_pr.clone()).map_err(|e| schema(&key, e))?;
        if let Some(p) = measurement.selected() {
            state
                .check_selective(p)
                .map_err(|e| schema("initial_pr", e))?;
        }
        initial_states.push(LabeledState { label, state });
    }

    let methods = match &file.methods {
        Some(list) => {
            if list.is_empty() {
                return Err(schema("methods", "at least one method is required"));
            }
            list.iter()
                .map(|m| {
                    Method::from_tag(m).ok_or_else(|| {
                        schema(
                            "methods",
                            format!("unknown method '{m}' (expected exact, limit, closed_form)"),
                        )
                    })
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => default_methods(mode, &ham, &measurement, &initial_states),
    };
    if methods.contains(&Method::ClosedForm)
        && initial_states
            .iter()
            .any(|s| ClosedForm::detect(&ham, &measurement, &s.state).is_none())
    {
        return Err(schema(
            "methods",
            "closed_form is only available for the SWAP examples",
        ));
    }

    let outputs = match &file.outputs {
        Some(list) => list
            .iter()
            .map(|o| {
                Output::from_tag(o).ok_or_else(|| {
                    schema(
                        "outputs",
                        format!("unknown output '{o}' (expected probabilities, bloch, matrix)"),
                    )
                })
            })
            .collect::<Result<Vec<_>, _>>()?,
        None => {
            if dims.sys == 2 {
                vec![Output::Probabilities, Output::Bloch]
            } else {
                vec![Output::Probabilities]
            }
        }
    };
    if outputs.contains(&Output::Bloch) && dims.sys != 2 {
        return Err(schema("outputs", "bloch output needs a qubit system"));
    }

    let tol = file.tolerances.clone().unwrap_or_default();
    let metric = match tol.metric.as_deref() {
        None => Metric::PUp,
        Some(m) => Metric::from_tag(m).ok_or_else(|| {
            schema(
                "tolerances.metric",
                format!("unknown metric '{m}' (expected p_up, bloch, trace_distance)"),
            )
        })?,
    };
    if metric == Metric::Bloch && dims.sys != 2 {
        return Err(schema(
            "tolerances.metric",
            "bloch metric needs a qubit system",
        ));
    }
    let tolerance = tol.max_deviation.unwrap_or(DEFAULT_TOLERANCE);
    if !(tolerance >= 0.0) {
        return Err(schema("tolerances.max_deviation", "must be non-negative"));
    }

    let scenario = Scenario {
        name: file.name.clone(),
        hamiltonian: ham,
        measurement,
        initial_states,
        tau,
        omega,
        t_max: file.t_max,
        grid_points: file.grid_points,
        outputs,
        methods,
        metric,
        tolerance,
    };
    scenario
        .validate()
        .map_err(|e| CliError::Schema(e.to_string()))?;
    Ok(LoadedScenario { mode, scenario })
}

fn default_methods(
    mode: Mode,
    ham: &HamiltonianSpec,
    meas: &MeasurementSpec,
    states: &[LabeledState],
) -> Vec<Method> {
    if mode == Mode::LimitOnly {
        return vec![Method::Limit];
    }
    let mut methods = vec![Method::Exact, Method::Limit];
    if !meas.is_selective()
        && states
            .iter()
            .all(|s| ClosedForm::detect(ham, meas, &s.state).is_some())
    {
        methods.push(Method::ClosedForm);
    }
    methods
}

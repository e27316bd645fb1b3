//! Scenario runner for the worked examples and τ-convergence studies.
//!
//! A [`Scenario`] fixes the physics (Hamiltonian, measurement, initial
//! states) and the stroboscopic parameters. Running it evaluates each
//! requested [`Method`] on a common grid of multiples of τ and compares every
//! method against the first one.

use std::fmt;

use crate::error::{Error, Result};
use crate::exact::{run_nonselective, run_selective, EvolutionPlan};
use crate::linalg::{bloch_vector, from_bloch, trace_distance, ComplexMatrix, Ket, C64};
use crate::model::{
    heisenberg3_hamiltonian, qubit_from_population, qubit_ket, swap_hamiltonian, FieldConfig,
    HamiltonianSpec, InitialState, MeasurementSpec, Projector,
};
use crate::nonselective_limit::{build_generator, example4_closed_form, semigroup_propagate};
use crate::selective_limit::{
    effective_rank1, effective_rankr, example1_closed_form, propagate_kraus,
};
use crate::trajectory::{Method, Sample, Trajectory};

/// Allowed mismatch in Ω = γ²τ.
pub const PARAMETER_TOL: f64 = 1e-12;

/// How two trajectories are compared sample by sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    /// |p↑ − p↑'|
    PUp,
    /// ‖r − r'‖ for qubit systems
    Bloch,
    /// ½‖ρ − ρ'‖₁
    TraceDistance,
}

impl Metric {
    pub fn tag(self) -> &'static str {
        match self {
            Metric::PUp => "p_up",
            Metric::Bloch => "bloch",
            Metric::TraceDistance => "trace_distance",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "p_up" => Some(Metric::PUp),
            "bloch" => Some(Metric::Bloch),
            "trace_distance" => Some(Metric::TraceDistance),
            _ => None,
        }
    }
}

/// Requested CSV content.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Output {
    Probabilities,
    Bloch,
    Matrix,
}

impl Output {
    pub fn tag(self) -> &'static str {
        match self {
            Output::Probabilities => "probabilities",
            Output::Bloch => "bloch",
            Output::Matrix => "matrix",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        match tag {
            "probabilities" => Some(Output::Probabilities),
            "bloch" => Some(Output::Bloch),
            "matrix" => Some(Output::Matrix),
            _ => None,
        }
    }
}

/// Closed forms available for the reference SWAP examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClosedForm {
    /// Post-selection of |↑⟩ on the probe.
    SelectiveSwap,
    /// Non-selective {|↑⟩, |↓⟩} measurement with the probe prepared in |↑⟩.
    NonselectiveSwap,
}

impl ClosedForm {
    pub fn detect(
        ham: &HamiltonianSpec,
        meas: &MeasurementSpec,
        init: &InitialState,
    ) -> Option<Self> {
        let dims = ham.dims();
        if dims.sys != 2 || dims.pr != 2 {
            return None;
        }
        if !ham
            .assemble()
            .approx_eq(&swap_hamiltonian(ham.gamma).assemble(), 1e-12)
        {
            return None;
        }
        let up = Ket::basis(2, 0).projector();
        let down = Ket::basis(2, 1).projector();
        let probe_up = init.rho_pr.approx_eq(&up, 1e-12);
        match meas.selected() {
            Some(p) if p.matrix().approx_eq(&up, 1e-12) && probe_up => {
                Some(ClosedForm::SelectiveSwap)
            }
            Some(_) => None,
            None => {
                let ps = meas.projectors();
                let z = ps.len() == 2
                    && ps.iter().any(|p| p.matrix().approx_eq(&up, 1e-12))
                    && ps.iter().any(|p| p.matrix().approx_eq(&down, 1e-12));
                (z && probe_up).then_some(ClosedForm::NonselectiveSwap)
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct LabeledState {
    pub label: String,
    pub state: InitialState,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub hamiltonian: HamiltonianSpec,
    pub measurement: MeasurementSpec,
    pub initial_states: Vec<LabeledState>,
    pub tau: f64,
    pub omega: f64,
    pub t_max: f64,
    /// Number of output samples; `None` keeps every multiple of τ.
    pub grid_points: Option<usize>,
    pub outputs: Vec<Output>,
    pub methods: Vec<Method>,
    pub metric: Metric,
    pub tolerance: f64,
}

impl Scenario {
    /// Checks parameter consistency and the shape of the inputs.
    pub fn validate(&self) -> Result<()> {
        let gamma = self.hamiltonian.gamma;
        if !(self.tau > 0.0) || !self.tau.is_finite() {
            return Err(Error::InvalidScenario(format!(
                "tau must be positive, got {}",
                self.tau
            )));
        }
        let mismatch = (gamma * gamma * self.tau - self.omega).abs();
        if mismatch > PARAMETER_TOL * self.omega.abs().max(1.0) {
            return Err(Error::InvalidScenario(format!(
                "omega = {} is inconsistent with gamma^2 tau = {} (mismatch {mismatch:e})",
                self.omega,
                gamma * gamma * self.tau
            )));
        }
        if !(self.t_max >= 0.0) {
            return Err(Error::InvalidScenario(format!(
                "t_max must be non-negative, got {}",
                self.t_max
            )));
        }
        if self.initial_states.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one initial state is required".into(),
            ));
        }
        if self.methods.is_empty() {
            return Err(Error::InvalidScenario(
                "at least one method is required".into(),
            ));
        }
        if matches!(self.grid_points, Some(n) if n < 2) {
            return Err(Error::InvalidScenario(
                "grid_points must be at least 2".into(),
            ));
        }
        let dims = self.hamiltonian.dims();
        for s in &self.initial_states {
            if s.state.dims() != dims {
                return Err(Error::InvalidScenario(format!(
                    "initial state '{}' has dimensions {}x{}, Hamiltonian expects {}x{}",
                    s.label,
                    s.state.dims().sys,
                    s.state.dims().pr,
                    dims.sys,
                    dims.pr
                )));
            }
        }
        if self.measurement.dim() != dims.pr {
            return Err(Error::InvalidScenario(
                "projector dimension differs from the probe".into(),
            ));
        }
        Ok(())
    }

    pub fn gamma(&self) -> f64 {
        self.hamiltonian.gamma
    }

    /// Same physics at a different τ, with γ = √(Ω/τ).
    pub fn with_tau(&self, tau: f64) -> Self {
        let mut out = self.clone();
        out.tau = tau;
        out.hamiltonian = self.hamiltonian.with_gamma((self.omega / tau).sqrt());
        out
    }

    /// Number of whole periods in t_max.
    pub fn steps(&self) -> usize {
        (self.t_max / self.tau + 1e-9).floor() as usize
    }

    /// Indices n of the sampled instants t = nτ.
    pub fn grid_indices(&self) -> Vec<usize> {
        let n = self.steps();
        let stride = match self.grid_points {
            Some(points) if n > 0 => n.div_ceil(points - 1).max(1),
            _ => 1,
        };
        let mut idx: Vec<usize> = (0..=n).step_by(stride).collect();
        if *idx.last().unwrap() != n {
            idx.push(n);
        }
        idx
    }

    pub fn times(&self) -> Vec<f64> {
        self.grid_indices()
            .iter()
            .map(|&n| n as f64 * self.tau)
            .collect()
    }

    pub fn closed_form(&self, init: &InitialState) -> Option<ClosedForm> {
        ClosedForm::detect(&self.hamiltonian, &self.measurement, init)
    }
}

/// Trajectory of one method on the scenario grid.
pub fn run_method(scenario: &Scenario, init: &InitialState, method: Method) -> Result<Trajectory> {
    let times = scenario.times();
    match method {
        Method::Exact => {
            let n = scenario.steps();
            let plan = EvolutionPlan::new(
                scenario.hamiltonian.clone(),
                scenario.measurement.clone(),
                scenario.tau,
                n as f64 * scenario.tau,
            )?;
            let full = if scenario.measurement.is_selective() {
                run_selective(&plan, init)?
            } else {
                run_nonselective(&plan, init)?
            };
            let mut traj = Trajectory::new(Method::Exact);
            for (&k, &t) in scenario.grid_indices().iter().zip(&times) {
                let mut s = full.samples[k].clone();
                s.t = t;
                traj.samples.push(s);
            }
            Ok(traj)
        }
        Method::Limit => match scenario.measurement.selected() {
            Some(p) => {
                init.check_selective(p)?;
                let eff = if p.rank() == 1 {
                    effective_rank1(&scenario.hamiltonian, &p.basis()[0], scenario.omega)?
                } else {
                    effective_rankr(&scenario.hamiltonian, p, scenario.omega)?
                };
                propagate_kraus(&eff, init, &times)
            }
            None => {
                let eff =
                    build_generator(&scenario.hamiltonian, &scenario.measurement, scenario.omega)?;
                semigroup_propagate(&eff, init, &times)
            }
        },
        Method::ClosedForm => {
            let kind = scenario.closed_form(init).ok_or_else(|| {
                Error::InvalidScenario("closed_form is only available for the SWAP examples".into())
            })?;
            let (gamma, omega) = (scenario.gamma(), scenario.omega);
            let rho0 = &init.rho_sys;
            let mut traj = Trajectory::new(Method::ClosedForm);
            for &t in &times {
                let (system, trace) = match kind {
                    ClosedForm::SelectiveSwap => example1_closed_form(gamma, omega, rho0, t),
                    ClosedForm::NonselectiveSwap => {
                        (example4_closed_form(gamma, omega, rho0, t), 1.0)
                    }
                };
                let state = system.scale_real(trace);
                traj.samples.push(Sample {
                    t,
                    state,
                    system,
                    trace,
                });
            }
            Ok(traj)
        }
    }
}

/// Deviation between two samples at one instant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviationPoint {
    pub t: f64,
    pub p_up: f64,
    pub trace_distance: f64,
    /// NaN for non-qubit systems.
    pub bloch: f64,
}

impl DeviationPoint {
    pub fn between(a: &Sample, b: &Sample) -> Self {
        let bloch = match (a.bloch(), b.bloch()) {
            (Some(x), Some(y)) => x
                .iter()
                .zip(&y)
                .map(|(p, q)| (p - q).powi(2))
                .sum::<f64>()
                .sqrt(),
            _ => f64::NAN,
        };
        Self {
            t: a.t,
            p_up: (a.p_up() - b.p_up()).abs(),
            trace_distance: trace_distance(&a.system, &b.system),
            bloch,
        }
    }

    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::PUp => self.p_up,
            Metric::Bloch => self.bloch,
            Metric::TraceDistance => self.trace_distance,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Comparison {
    pub label: String,
    pub reference: Method,
    pub candidate: Method,
    pub points: Vec<DeviationPoint>,
}

impl Comparison {
    pub fn new(label: &str, reference: &Trajectory, candidate: &Trajectory) -> Result<Self> {
        let points = reference
            .samples
            .iter()
            .zip(&candidate.samples)
            .map(|(a, b)| DeviationPoint::between(a, b))
            .collect();
        Ok(Self {
            label: label.to_string(),
            reference: reference.method,
            candidate: candidate.method,
            points,
        })
    }

    pub fn max(&self, metric: Metric) -> f64 {
        self.points
            .iter()
            .map(|p| p.get(metric))
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct RunSet {
    pub label: String,
    pub trajectories: Vec<Trajectory>,
}

impl RunSet {
    pub fn get(&self, method: Method) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.method == method)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub tau: f64,
    pub gamma: f64,
    pub max_deviation: f64,
    /// Previous row's deviation over this one.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    pub fn from_points(points: Vec<(f64, f64, f64)>) -> Self {
        let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(points.len());
        for (tau, gamma, max_deviation) in points {
            let ratio = rows.last().map(|r| r.max_deviation / max_deviation);
            rows.push(ConvergenceRow {
                tau,
                gamma,
                max_deviation,
                ratio,
            });
        }
        Self { rows }
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.rows
            .windows(2)
            .all(|w| w[1].max_deviation < w[0].max_deviation)
    }

    pub fn min_ratio(&self) -> Option<f64> {
        self.rows.iter().filter_map(|r| r.ratio).reduce(f64::min)
    }
}

/// Bloch-ball image at one instant (Example 4 snapshots).
#[derive(Clone, Debug)]
pub struct BlochSnapshot {
    pub t: f64,
    pub points: Vec<[f64; 3]>,
}

#[derive(Clone, Debug)]
pub struct ComparisonReport {
    pub name: String,
    pub metric: Metric,
    pub tolerance: f64,
    pub runs: Vec<RunSet>,
    pub comparisons: Vec<Comparison>,
    pub convergence: ConvergenceTable,
    pub snapshots: Vec<BlochSnapshot>,
}

impl ComparisonReport {
    /// Largest deviation over all comparisons under the report's metric.
    pub fn max_deviation(&self) -> f64 {
        self.comparisons
            .iter()
            .map(|c| c.max(self.metric))
            .fold(0.0, f64::max)
    }

    pub fn passed(&self) -> bool {
        self.max_deviation() <= self.tolerance
    }

    pub fn run(&self, label: &str) -> Option<&RunSet> {
        self.runs.iter().find(|r| r.label == label)
    }

    /// p_err = 1 − tr ρ̃ series of one trajectory.
    pub fn p_err(&self, label: &str, method: Method) -> Option<Vec<(f64, f64)>> {
        let traj = self.run(label)?.get(method)?;
        Some(traj.samples.iter().map(|s| (s.t, s.p_err())).collect())
    }
}

impl fmt::Display for ComparisonReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.name)?;
        for c in &self.comparisons {
            writeln!(
                f,
                "  {:<12} {} vs {}: max {} deviation {:.3e}",
                c.label,
                c.reference,
                c.candidate,
                self.metric.tag(),
                c.max(self.metric)
            )?;
        }
        for r in &self.convergence.rows {
            match r.ratio {
                Some(q) => writeln!(
                    f,
                    "  tau {:.6e}  max deviation {:.6e}  ratio {q:.4}",
                    r.tau, r.max_deviation
                )?,
                None => writeln!(
                    f,
                    "  tau {:.6e}  max deviation {:.6e}",
                    r.tau, r.max_deviation
                )?,
            }
        }
        Ok(())
    }
}

/// Runs every method on every initial state and compares against the first method.
pub fn run_scenario(scenario: &Scenario) -> Result<ComparisonReport> {
    scenario.validate()?;
    let mut runs = Vec::new();
    let mut comparisons = Vec::new();
    for s in &scenario.initial_states {
        let trajectories = scenario
            .methods
            .iter()
            .map(|&m| run_method(scenario, &s.state, m))
            .collect::<Result<Vec<_>>>()?;
        for other in &trajectories[1..] {
            comparisons.push(Comparison::new(&s.label, &trajectories[0], other)?);
        }
        runs.push(RunSet {
            label: s.label.clone(),
            trajectories,
        });
    }
    Ok(ComparisonReport {
        name: scenario.name.clone(),
        metric: scenario.metric,
        tolerance: scenario.tolerance,
        runs,
        comparisons,
        convergence: ConvergenceTable::default(),
        snapshots: Vec::new(),
    })
}

/// Max deviation between the first two methods at one τ (Ω fixed).
pub fn sweep_point(scenario: &Scenario, tau: f64) -> Result<(f64, f64, f64)> {
    if scenario.methods.len() < 2 {
        return Err(Error::InvalidScenario(
            "a sweep needs two methods to compare".into(),
        ));
    }
    let mut s = scenario.with_tau(tau);
    s.methods.truncate(2);
    let report = run_scenario(&s)?;
    Ok((tau, s.gamma(), report.max_deviation()))
}

/// Deviation per τ with Ω held fixed, in the given order.
pub fn convergence_sweep(scenario: &Scenario, taus: &[f64]) -> Result<ComparisonReport> {
    check_sweep(taus)?;
    let points = taus
        .iter()
        .map(|&tau| sweep_point(scenario, tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(sweep_report(scenario, points))
}

pub fn check_sweep(taus: &[f64]) -> Result<()> {
    if taus.len() < 2 {
        return Err(Error::InvalidScenario(format!(
            "a convergence sweep needs at least two tau values, got {}",
            taus.len()
        )));
    }
    if let Some(bad) = taus.iter().find(|t| !(**t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidScenario(format!(
            "tau values must be positive, got {bad}"
        )));
    }
    Ok(())
}

pub fn sweep_report(scenario: &Scenario, points: Vec<(f64, f64, f64)>) -> ComparisonReport {
    ComparisonReport {
        name: scenario.name.clone(),
        metric: scenario.metric,
        tolerance: scenario.tolerance,
        runs: Vec::new(),
        comparisons: Vec::new(),
        convergence: ConvergenceTable::from_points(points),
        snapshots: Vec::new(),
    }
}

fn population_states(populations: &[f64], probe: &Ket) -> Vec<LabeledState> {
    populations
        .iter()
        .map(|&p| LabeledState {
            label: format!("alpha2={p}"),
            state: InitialState::pure(&qubit_from_population(p), probe).expect("normalized kets"),
        })
        .collect()
}

fn basis_projector(labels: &[&str]) -> Projector {
    let kets: Vec<Ket> = labels
        .iter()
        .map(|l| qubit_ket(l).expect("valid label"))
        .collect();
    Projector::from_kets(&kets).expect("orthonormal basis kets")
}

fn plus() -> Ket {
    Ket::from_real(&[1.0, 1.0]).normalized().expect("nonzero")
}

/// γ·SWAP with post-selection of |↑⟩ (γ = 5, τ = 0.04, Ω = 1).
pub fn example1_scenario() -> Scenario {
    let (gamma, tau) = (5.0, 0.04);
    Scenario {
        name: "example1".into(),
        hamiltonian: swap_hamiltonian(gamma),
        measurement: MeasurementSpec::selective(basis_projector(&["u"])),
        initial_states: population_states(&[0.01, 0.2, 0.6, 1.0], &Ket::basis(2, 0)),
        tau,
        omega: gamma * gamma * tau,
        t_max: 10.0,
        grid_points: None,
        outputs: vec![Output::Probabilities, Output::Bloch],
        methods: vec![Method::Exact, Method::Limit],
        metric: Metric::PUp,
        tolerance: 0.02,
    }
}

/// Three-qubit Heisenberg chain with local fields, probe post-selected in
/// the zero-magnetization sector (γ = 5, τ = 0.04).
pub fn example2_scenario() -> Scenario {
    let (gamma, tau) = (5.0, 0.04);
    let probe = qubit_ket("ud").expect("valid label");
    Scenario {
        name: "example2".into(),
        hamiltonian: heisenberg3_hamiltonian(gamma, FieldConfig::LocalXyz),
        measurement: MeasurementSpec::selective(basis_projector(&["ud", "du"])),
        initial_states: vec![LabeledState {
            label: "plus".into(),
            state: InitialState::pure(&plus(), &probe).expect("normalized kets"),
        }],
        tau,
        omega: gamma * gamma * tau,
        t_max: 10.0,
        grid_points: None,
        outputs: vec![Output::Bloch],
        methods: vec![Method::Exact, Method::Limit],
        metric: Metric::Bloch,
        tolerance: 0.1,
    }
}

/// Three-qubit Heisenberg chain in a global z field, probe post-selected in
/// the aligned sector (γ = 2√2, τ = 0.02).
pub fn example3_scenario() -> Scenario {
    let (gamma, tau) = (2.0 * 2f64.sqrt(), 0.02);
    let probe = Ket::from_real(&[1.0, 0.0, 0.0, 1.0])
        .normalized()
        .expect("nonzero");
    Scenario {
        name: "example3".into(),
        hamiltonian: heisenberg3_hamiltonian(gamma, FieldConfig::GlobalZ),
        measurement: MeasurementSpec::selective(basis_projector(&["uu", "dd"])),
        initial_states: vec![LabeledState {
            label: "plus".into(),
            state: InitialState::pure(&plus(), &probe).expect("normalized kets"),
        }],
        tau,
        omega: gamma * gamma * tau,
        t_max: 10.0,
        grid_points: None,
        outputs: vec![Output::Bloch, Output::Probabilities],
        methods: vec![Method::Exact, Method::Limit],
        metric: Metric::Bloch,
        tolerance: 0.1,
    }
}

/// γ·SWAP with the probe measured non-selectively in {|↑⟩, |↓⟩}
/// (γ = 5, τ = 0.04, Ω = 1).
pub fn example4_scenario() -> Scenario {
    let (gamma, tau) = (5.0, 0.04);
    Scenario {
        name: "example4".into(),
        hamiltonian: swap_hamiltonian(gamma),
        measurement: MeasurementSpec::nonselective(vec![
            basis_projector(&["u"]),
            basis_projector(&["d"]),
        ])
        .expect("complete family"),
        initial_states: population_states(&[0.01, 0.3, 0.6, 1.0], &Ket::basis(2, 0)),
        tau,
        omega: gamma * gamma * tau,
        t_max: 10.0,
        grid_points: None,
        outputs: vec![Output::Probabilities, Output::Bloch],
        methods: vec![Method::Exact, Method::ClosedForm, Method::Limit],
        metric: Metric::PUp,
        tolerance: 0.03,
    }
}

pub fn run_example1() -> Result<ComparisonReport> {
    run_scenario(&example1_scenario())
}

pub fn run_example2() -> Result<ComparisonReport> {
    run_scenario(&example2_scenario())
}

pub fn run_example3() -> Result<ComparisonReport> {
    run_scenario(&example3_scenario())
}

/// Excited-state comparison plus Bloch-ball snapshots at Ω = 0.1,
/// T = 0, 5, …, 30.
pub fn run_example4() -> Result<ComparisonReport> {
    let mut report = run_scenario(&example4_scenario())?;
    let times: Vec<f64> = (0..=6).map(|k| 5.0 * k as f64).collect();
    report.snapshots = bloch_snapshots(5.0, 0.1, &times, &bloch_sphere_grid(6, 12));
    Ok(report)
}

/// Points on the unit sphere: `rings` polar rings (poles included) of
/// `per_ring` azimuths.
pub fn bloch_sphere_grid(rings: usize, per_ring: usize) -> Vec<[f64; 3]> {
    let mut pts = vec![[0.0, 0.0, 1.0]];
    for k in 1..rings {
        let theta = std::f64::consts::PI * k as f64 / rings as f64;
        for m in 0..per_ring {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / per_ring as f64;
            pts.push([
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ]);
        }
    }
    pts.push([0.0, 0.0, -1.0]);
    pts
}

/// Images of Bloch vectors under the non-selective SWAP closed form.
pub fn bloch_snapshots(
    gamma: f64,
    omega: f64,
    times: &[f64],
    points: &[[f64; 3]],
) -> Vec<BlochSnapshot> {
    times
        .iter()
        .map(|&t| BlochSnapshot {
            t,
            points: points
                .iter()
                .map(|&r| bloch_vector(&example4_closed_form(gamma, omega, &from_bloch(r), t)))
                .collect(),
        })
        .collect()
}

/// A recurrence in the late part of a qubit trajectory: times t₁ < t₂ with
/// t₁ ≥ `after`, t₂ − t₁ ≥ `min_gap` and ‖r(t₂) − r(t₁)‖ ≤ `radius`, on a
/// trajectory whose late part moves by more than `radius` overall.
pub fn recurrence(
    traj: &Trajectory,
    after: f64,
    min_gap: f64,
    radius: f64,
) -> Option<(f64, f64, f64)> {
    let late: Vec<(f64, [f64; 3])> = traj
        .samples
        .iter()
        .filter(|s| s.t >= after)
        .filter_map(|s| s.bloch().map(|r| (s.t, r)))
        .collect();
    let dist = |a: &[f64; 3], b: &[f64; 3]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let spread = late
        .iter()
        .flat_map(|(_, a)| late.iter().map(move |(_, b)| dist(a, b)))
        .fold(0.0, f64::max);
    if spread <= radius {
        return None;
    }
    let mut best: Option<(f64, f64, f64)> = None;
    for (i, (t1, r1)) in late.iter().enumerate() {
        for (t2, r2) in &late[i + 1..] {
            if t2 - t1 < min_gap {
                continue;
            }
            let d = dist(r1, r2);
            if d <= radius && best.is_none_or(|b| d < b.2) {
                best = Some((*t1, *t2, d));
            }
        }
    }
    best
}

/// Smallest purity along a trajectory.
pub fn min_purity(traj: &Trajectory) -> f64 {
    traj.samples
        .iter()
        .map(Sample::purity)
        .fold(f64::INFINITY, f64::min)
}

/// Explicit-term Hamiltonian helper: complex matrix from real/imag parts.
pub fn complex_matrix(dim: usize, re: &[f64], im: &[f64]) -> Result<ComplexMatrix> {
    if re.len() != dim * dim || im.len() != dim * dim {
        return Err(Error::DimensionMismatch {
            expected: dim * dim,
            found: re.len().min(im.len()),
            context: "matrix entries",
        });
    }
    ComplexMatrix::from_row_major(re.iter().zip(im).map(|(&a, &b)| C64::new(a, b)).collect())
}

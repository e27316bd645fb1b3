//! Step-by-step interrupted evolution: unitary periods of length τ, each
//! followed by a projective measurement of the probe.
//!
//! Measurements happen at t = τ, 2τ, …, Nτ with N = ⌊T/τ⌋; the initial state
//! already lies in the measured sector (it is the outcome of the measurement
//! at t = 0). Samples at t = nτ are taken right after the n-th measurement,
//! and a final sample at T follows the residual unitary U_{T−Nτ} when
//! T is not a multiple of τ.

use log::info;

use crate::error::{Error, Result};
use crate::linalg::{expm, partial_trace, ComplexMatrix, Subsystem, TensorDims, C64, DEFAULT_TOL};
use crate::model::{HamiltonianSpec, InitialState, MeasurementSpec};
use crate::trajectory::{Method, Sample, Trajectory};

pub const DEFAULT_PROBABILITY_FLOOR: f64 = 1e-14;

/// Slack used when counting whole periods in T/τ.
const STEP_COUNT_SLACK: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct EvolutionPlan {
    pub hamiltonian: HamiltonianSpec,
    pub measurement: MeasurementSpec,
    pub tau: f64,
    pub total_time: f64,
    /// Outcomes i₁..i_N; `None` means every outcome equals the selected index.
    pub outcome_sequence: Option<Vec<usize>>,
    pub probability_floor: f64,
}

impl EvolutionPlan {
    pub fn new(
        hamiltonian: HamiltonianSpec,
        measurement: MeasurementSpec,
        tau: f64,
        total_time: f64,
    ) -> Result<Self> {
        if !(tau > 0.0 && tau.is_finite()) {
            return Err(Error::InvalidPlan(format!(
                "tau must be positive, got {tau}"
            )));
        }
        if !(total_time >= 0.0 && total_time.is_finite()) {
            return Err(Error::InvalidPlan(format!(
                "total time must be non-negative, got {total_time}"
            )));
        }
        if measurement.dim() != hamiltonian.dims().pr {
            return Err(Error::DimensionMismatch {
                expected: hamiltonian.dims().pr,
                found: measurement.dim(),
                context: "projector vs probe dimension",
            });
        }
        Ok(Self {
            hamiltonian,
            measurement,
            tau,
            total_time,
            outcome_sequence: None,
            probability_floor: DEFAULT_PROBABILITY_FLOOR,
        })
    }

    pub fn with_outcomes(mut self, outcomes: Vec<usize>) -> Result<Self> {
        if outcomes.len() != self.steps() {
            return Err(Error::InvalidPlan(format!(
                "outcome sequence has length {}, expected N = {}",
                outcomes.len(),
                self.steps()
            )));
        }
        if let Some(&bad) = outcomes
            .iter()
            .find(|&&i| i >= self.measurement.projectors().len())
        {
            return Err(Error::IndexOutOfRange {
                index: bad,
                len: self.measurement.projectors().len(),
                context: "outcome sequence",
            });
        }
        self.outcome_sequence = Some(outcomes);
        Ok(self)
    }

    pub fn with_probability_floor(mut self, floor: f64) -> Self {
        self.probability_floor = floor;
        self
    }

    /// N = ⌊T/τ⌋
    pub fn steps(&self) -> usize {
        (self.total_time / self.tau + STEP_COUNT_SLACK).floor() as usize
    }

    /// T − Nτ, clamped at zero.
    pub fn residual(&self) -> f64 {
        let r = self.total_time - self.steps() as f64 * self.tau;
        if r.abs() <= STEP_COUNT_SLACK * self.tau {
            0.0
        } else {
            r.max(0.0)
        }
    }

    fn outcome(&self, step: usize) -> Result<usize> {
        match (&self.outcome_sequence, self.measurement.selected_index()) {
            (Some(seq), _) => Ok(seq[step]),
            (None, Some(i)) => Ok(i),
            (None, None) => Err(Error::InvalidPlan(
                "selective run needs a selected index or an outcome sequence".into(),
            )),
        }
    }
}

/// 𝒰_t[ρ] = e^{−iHt} ρ e^{iHt}
pub fn unitary_step(rho: &ComplexMatrix, h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if rho.dim() != h.dim() {
        return Err(Error::DimensionMismatch {
            expected: h.dim(),
            found: rho.dim(),
            context: "unitary_step",
        });
    }
    let u = propagator(h, t)?;
    Ok(rho.sandwich(&u))
}

/// e^{−iHt}
pub fn propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    expm(&h.scale(C64::new(0.0, -t)))
}

/// ℐ_i[ρ] = C_i ρ C_i for a projector C_i.
pub fn apply_instrument(rho: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    if rho.dim() != c.dim() {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: rho.dim(),
            context: "apply_instrument",
        });
    }
    if !c.is_projector(DEFAULT_TOL) {
        return Err(Error::NotProjector {
            tol: DEFAULT_TOL,
            context: "instrument Kraus operator",
        });
    }
    Ok(rho.sandwich(c))
}

fn dims_for(plan: &EvolutionPlan, init: &InitialState) -> Result<TensorDims> {
    let dims = plan.hamiltonian.dims();
    if init.dims() != dims {
        return Err(Error::DimensionMismatch {
            expected: dims.total(),
            found: init.dims().total(),
            context: "initial state vs Hamiltonian",
        });
    }
    Ok(dims)
}

fn sample(t: f64, state: ComplexMatrix, dims: TensorDims) -> Result<Sample> {
    let trace = state.trace().re;
    let system = partial_trace(&state, dims, Subsystem::System)?.scale_real(1.0 / trace);
    Ok(Sample {
        t,
        state,
        system,
        trace,
    })
}

/// Selective run: Φ_T = 𝒰_{T−Nτ} ∘ (ℐ ∘ 𝒰_τ)^N on unnormalized states.
///
/// Each sample's `trace` is the success probability p_Φ of the recorded
/// outcome string up to that instant.
pub fn run_selective(plan: &EvolutionPlan, init: &InitialState) -> Result<Trajectory> {
    let dims = dims_for(plan, init)?;
    if plan.outcome_sequence.is_none() {
        let selected = plan.measurement.selected().ok_or_else(|| {
            Error::InvalidPlan("selective run needs a selected index or an outcome sequence".into())
        })?;
        init.check_selective(selected)?;
    }
    let h = plan.hamiltonian.assemble();
    let u = propagator(&h, plan.tau)?;
    let kraus: Vec<ComplexMatrix> = plan
        .measurement
        .lifted(dims.sys)
        .iter()
        .map(|c| c.matmul(&u))
        .collect();

    let mut traj = Trajectory::new(Method::Exact);
    let mut rho = init.global();
    traj.samples.push(sample(0.0, rho.clone(), dims)?);
    for step in 0..plan.steps() {
        let outcome = plan.outcome(step)?;
        rho = rho.sandwich(&kraus[outcome]);
        let t = (step + 1) as f64 * plan.tau;
        let p = rho.trace().re;
        if p <= plan.probability_floor {
            return Err(Error::VanishingProbability { t, probability: p });
        }
        traj.samples.push(sample(t, rho.clone(), dims)?);
    }
    let residual = plan.residual();
    if residual > 0.0 {
        rho = unitary_step(&rho, &h, residual)?;
        traj.samples.push(sample(plan.total_time, rho, dims)?);
    }
    Ok(traj)
}

/// Λ[ρ] = Σ_i C_i ρ C_i with C_i = I_sys ⊗ P_i.
pub fn nonselective_channel(rho: &ComplexMatrix, spec: &MeasurementSpec) -> Result<ComplexMatrix> {
    spec.check_complete()?;
    let dp = spec.dim();
    if !rho.dim().is_multiple_of(dp) {
        return Err(Error::DimensionMismatch {
            expected: dp,
            found: rho.dim(),
            context: "state dimension must be a multiple of the probe dimension",
        });
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for c in spec.lifted(rho.dim() / dp) {
        out += &rho.sandwich(&c);
    }
    Ok(out)
}

/// Non-selective run: Φ_T = 𝒰_{T−Nτ} ∘ (Λ ∘ 𝒰_τ)^N.
///
/// An initial state that is not Λ-invariant is replaced by Λ[ρ(0)], i.e. the
/// clock starts at the first measurement.
pub fn run_nonselective(plan: &EvolutionPlan, init: &InitialState) -> Result<Trajectory> {
    let dims = dims_for(plan, init)?;
    plan.measurement.check_complete()?;
    let h = plan.hamiltonian.assemble();
    let u = propagator(&h, plan.tau)?;
    let mut rho = init.global();
    if !init.is_channel_invariant(&plan.measurement) {
        info!("initial state is not invariant under the measurement channel; applying it at t = 0");
        rho = nonselective_channel(&rho, &plan.measurement)?;
    }
    let mut traj = Trajectory::new(Method::Exact);
    traj.samples.push(sample(0.0, rho.clone(), dims)?);
    for step in 0..plan.steps() {
        rho = nonselective_channel(&rho.sandwich(&u), &plan.measurement)?;
        traj.samples
            .push(sample((step + 1) as f64 * plan.tau, rho.clone(), dims)?);
    }
    let residual = plan.residual();
    if residual > 0.0 {
        rho = unitary_step(&rho, &h, residual)?;
        traj.samples.push(sample(plan.total_time, rho, dims)?);
    }
    Ok(traj)
}

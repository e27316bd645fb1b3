//! Stroboscopic limit of post-selected (coincident-outcome) measurements.
//!
//! For a rank-1 probe projector |φ⟩⟨φ| the conditional system dynamics is
//! generated by H_eff = H₁ − iH₂ on the system alone, with
//!
//! ```text
//! H₁ = γ Σ_j A_j ⟨B_j⟩,
//! H₂ = (Ω/2) Σ_jk A_j A_k (⟨B_j B_k⟩ − ⟨B_j⟩⟨B_k⟩),      ⟨·⟩ = ⟨φ|·|φ⟩.
//! ```
//!
//! For a rank-r projector P the generator acts on H_sys ⊗ range(P) with
//! G_j = P B_j P and G_jk = P B_j B_k P:
//!
//! ```text
//! H₁ = γ Σ_j A_j ⊗ G_j,
//! H₂ = (Ω/2) Σ_jk A_j A_k ⊗ (G_jk − G_j G_k).
//! ```
//!
//! Both operators are built directly from these closed forms; the O(√τ)
//! remainder is not represented.

use crate::error::{Error, Result};
use crate::exact::DEFAULT_PROBABILITY_FLOOR;
use crate::linalg::{
    anticommutator, commutator, expm, kron, lift_probe, partial_trace, rk4_sample, ComplexMatrix,
    Ket, Subsystem, TensorDims, C64, DEFAULT_TOL, ONE, ZERO,
};
use crate::model::{HamiltonianSpec, InitialState, Projector};
use crate::trajectory::{Method, Sample, Trajectory, Truncation};

/// Where the effective generator acts.
#[derive(Clone, Debug)]
pub enum EffectiveSpace {
    /// System only; the probe stays frozen in |φ⟩.
    System { phi: Ket },
    /// Full system ⊗ probe space, with H₁ and H₂ supported in supp C.
    SystemTimesRange {
        dims: TensorDims,
        support: ComplexMatrix,
    },
}

#[derive(Clone, Debug)]
pub struct SelectiveEffective {
    pub h1: ComplexMatrix,
    pub h2: ComplexMatrix,
    pub space: EffectiveSpace,
    pub gamma: f64,
    pub omega: f64,
    /// M_jk = ⟨B_j B_k⟩ − ⟨B_j⟩⟨B_k⟩ (rank-1 only).
    pub covariance: Option<ComplexMatrix>,
}

impl SelectiveEffective {
    /// H₁ − iH₂
    pub fn h_eff(&self) -> ComplexMatrix {
        &self.h1 - &self.h2.scale(C64::new(0.0, 1.0))
    }

    /// K(T) = exp(−i·H_eff·T)
    pub fn kraus(&self, t: f64) -> Result<ComplexMatrix> {
        expm(&self.h_eff().scale(C64::new(0.0, -t)))
    }

    /// τ = Ω/γ² implied by the parameters.
    pub fn tau(&self) -> f64 {
        self.omega / (self.gamma * self.gamma)
    }

    pub fn dim(&self) -> usize {
        self.h1.dim()
    }
}

/// Rank-1 effective Hamiltonian for a normalized probe vector φ.
pub fn effective_rank1(ham: &HamiltonianSpec, phi: &Ket, omega: f64) -> Result<SelectiveEffective> {
    let dims = ham.dims();
    if phi.dim() != dims.pr {
        return Err(Error::DimensionMismatch {
            expected: dims.pr,
            found: phi.dim(),
            context: "probe vector",
        });
    }
    if (phi.norm() - 1.0).abs() > DEFAULT_TOL {
        return Err(Error::NotNormalized {
            norm: phi.norm(),
            context: "effective_rank1 probe vector",
        });
    }
    let n = ham.terms.len();
    let mean: Vec<C64> = ham
        .terms
        .iter()
        .map(|t| t.probe.expectation(phi, phi))
        .collect();
    let covariance = ComplexMatrix::from_fn(n, |j, k| {
        let bjbk = ham.terms[j].probe.matmul(&ham.terms[k].probe);
        bjbk.expectation(phi, phi) - mean[j] * mean[k]
    });

    let mut h1 = ComplexMatrix::zeros(dims.sys);
    for (t, m) in ham.terms.iter().zip(&mean) {
        h1 += &t.system.scale(*m);
    }
    let h1 = h1.scale_real(ham.gamma);

    let mut h2 = ComplexMatrix::zeros(dims.sys);
    for (j, tj) in ham.terms.iter().enumerate() {
        for (k, tk) in ham.terms.iter().enumerate() {
            let m = covariance[(j, k)];
            if m != ZERO {
                h2 += &tj.system.matmul(&tk.system).scale(m);
            }
        }
    }
    let h2 = h2.scale_real(0.5 * omega);

    Ok(SelectiveEffective {
        h1,
        h2,
        space: EffectiveSpace::System { phi: phi.clone() },
        gamma: ham.gamma,
        omega,
        covariance: Some(covariance),
    })
}

/// Rank-r effective Hamiltonian on H_sys ⊗ range(P).
pub fn effective_rankr(
    ham: &HamiltonianSpec,
    projector: &Projector,
    omega: f64,
) -> Result<SelectiveEffective> {
    let dims = ham.dims();
    let p = projector.matrix();
    if p.dim() != dims.pr {
        return Err(Error::DimensionMismatch {
            expected: dims.pr,
            found: p.dim(),
            context: "probe projector",
        });
    }
    if !p.is_projector(DEFAULT_TOL) {
        return Err(Error::NotProjector {
            tol: DEFAULT_TOL,
            context: "effective_rankr",
        });
    }
    let g: Vec<ComplexMatrix> = ham
        .terms
        .iter()
        .map(|t| p.matmul(&t.probe).matmul(p))
        .collect();

    let mut h1 = ComplexMatrix::zeros(dims.total());
    for (t, gj) in ham.terms.iter().zip(&g) {
        h1 += &kron(&t.system, gj);
    }
    let h1 = h1.scale_real(ham.gamma);

    let mut h2 = ComplexMatrix::zeros(dims.total());
    for (j, tj) in ham.terms.iter().enumerate() {
        for (k, tk) in ham.terms.iter().enumerate() {
            let gjk = p.matmul(&tj.probe).matmul(&tk.probe).matmul(p);
            let cov = gjk - g[j].matmul(&g[k]);
            if cov.max_abs() > 0.0 {
                h2 += &kron(&tj.system.matmul(&tk.system), &cov);
            }
        }
    }
    let h2 = h2.scale_real(0.5 * omega);

    Ok(SelectiveEffective {
        h1,
        h2,
        space: EffectiveSpace::SystemTimesRange {
            dims,
            support: lift_probe(p, dims.sys),
        },
        gamma: ham.gamma,
        omega,
        covariance: None,
    })
}

/// Initial operator in the effective space, validated against its support.
pub fn initial_operator(eff: &SelectiveEffective, init: &InitialState) -> Result<ComplexMatrix> {
    match &eff.space {
        EffectiveSpace::System { phi } => {
            if init.rho_sys.dim() != eff.dim() {
                return Err(Error::DimensionMismatch {
                    expected: eff.dim(),
                    found: init.rho_sys.dim(),
                    context: "initial system state",
                });
            }
            if !init.rho_pr.approx_eq(&phi.projector(), DEFAULT_TOL) {
                return Err(Error::InvalidInitialState(
                    "ρ_pr = |φ⟩⟨φ| for a rank-1 measurement",
                ));
            }
            Ok(init.rho_sys.clone())
        }
        EffectiveSpace::SystemTimesRange { dims, support } => {
            if init.dims() != *dims {
                return Err(Error::DimensionMismatch {
                    expected: dims.total(),
                    found: init.dims().total(),
                    context: "initial state",
                });
            }
            let rho = init.global();
            if !rho.sandwich(support).approx_eq(&rho, DEFAULT_TOL) {
                return Err(Error::InvalidInitialState("supp ρ(0) ⊆ supp C_i"));
            }
            Ok(rho)
        }
    }
}

/// Normalized reduced system state of an operator in the effective space.
pub fn system_state(eff: &SelectiveEffective, state: &ComplexMatrix) -> Result<ComplexMatrix> {
    let trace = state.trace().re;
    match &eff.space {
        EffectiveSpace::System { .. } => Ok(state.scale_real(1.0 / trace)),
        EffectiveSpace::SystemTimesRange { dims, .. } => {
            Ok(partial_trace(state, *dims, Subsystem::System)?.scale_real(1.0 / trace))
        }
    }
}

/// ρ(T) = K ρ(0) K† with K = exp(−i H_eff T) at each time of the grid.
///
/// The trajectory stops early, with [`Trajectory::truncated`] set, once the
/// unnormalized trace drops to the default probability floor.
pub fn propagate_kraus(
    eff: &SelectiveEffective,
    init: &InitialState,
    times: &[f64],
) -> Result<Trajectory> {
    propagate_kraus_with_floor(eff, init, times, DEFAULT_PROBABILITY_FLOOR)
}

pub fn propagate_kraus_with_floor(
    eff: &SelectiveEffective,
    init: &InitialState,
    times: &[f64],
    floor: f64,
) -> Result<Trajectory> {
    let rho0 = initial_operator(eff, init)?;
    let mut traj = Trajectory::new(Method::Limit);
    for &t in times {
        let state = rho0.sandwich(&eff.kraus(t)?);
        let trace = state.trace().re;
        if trace <= floor {
            traj.truncated = Some(Truncation {
                t,
                probability: trace,
            });
            break;
        }
        let system = system_state(eff, &state)?;
        traj.samples.push(Sample {
            t,
            state,
            system,
            trace,
        });
    }
    Ok(traj)
}

/// Conditional system state for γ·SWAP with the probe post-selected in |↑⟩:
/// K = diag(e^{−iγT}, e^{−ΩT/2}). Returns the normalized state and tr Kρ₀K†.
pub fn example1_closed_form(
    gamma: f64,
    omega: f64,
    rho0: &ComplexMatrix,
    t: f64,
) -> (ComplexMatrix, f64) {
    let k = ComplexMatrix::diag(&[
        C64::new(0.0, -gamma * t).exp(),
        C64::new((-0.5 * omega * t).exp(), 0.0),
    ]);
    let unnormalized = rho0.sandwich(&k);
    let trace = unnormalized.trace().re;
    (unnormalized.scale_real(1.0 / trace), trace)
}

/// dρ/dT = −i[H₁, ρ] − {H₂, ρ} + 2 tr(H₂ρ) ρ
pub fn nonlinear_density_rhs(eff: &SelectiveEffective, rho: &ComplexMatrix) -> ComplexMatrix {
    let decay = eff.h2.matmul(rho).trace().re;
    commutator(&eff.h1, rho).scale(C64::new(0.0, -1.0)) - anticommutator(&eff.h2, rho)
        + rho.scale_real(2.0 * decay)
}

/// dψ/dT = −i(H₁ − iH₂)ψ + ⟨ψ|H₂|ψ⟩ ψ
pub fn nonlinear_state_rhs(eff: &SelectiveEffective, psi: &Ket) -> Ket {
    let h2psi = eff.h2.apply(psi);
    let decay = psi.inner(&h2psi).re;
    eff.h1
        .apply(psi)
        .scale(C64::new(0.0, -1.0))
        .sub(&h2psi)
        .add(&psi.scale(C64::new(decay, 0.0)))
}

/// d tr(ρ²)/dT = 4 (tr ρ² · tr H₂ρ − tr H₂ρ²)
pub fn purity_derivative(eff: &SelectiveEffective, rho: &ComplexMatrix) -> f64 {
    let rho2 = rho.matmul(rho);
    let purity = rho2.trace().re;
    4.0 * (purity * eff.h2.matmul(rho).trace().re - eff.h2.matmul(&rho2).trace().re)
}

/// RK4 integration of the nonlinear density equation, sampled at `times`.
pub fn integrate_density(
    eff: &SelectiveEffective,
    rho0: &ComplexMatrix,
    times: &[f64],
    max_dt: f64,
) -> Vec<ComplexMatrix> {
    rk4_sample(
        |rho: &ComplexMatrix| nonlinear_density_rhs(eff, rho),
        rho0,
        times,
        max_dt,
    )
}

/// RK4 integration of the nonlinear state-vector equation, sampled at `times`.
pub fn integrate_state(
    eff: &SelectiveEffective,
    psi0: &Ket,
    times: &[f64],
    max_dt: f64,
) -> Vec<Ket> {
    rk4_sample(
        |psi: &Ket| nonlinear_state_rhs(eff, psi),
        psi0,
        times,
        max_dt,
    )
}

/// Trajectory wrapper around [`integrate_density`] for normalized system
/// states in the rank-1 space.
pub fn density_trajectory(
    eff: &SelectiveEffective,
    rho0: &ComplexMatrix,
    times: &[f64],
    max_dt: f64,
) -> Trajectory {
    let states = integrate_density(eff, rho0, times, max_dt);
    let mut traj = Trajectory::new(Method::Limit);
    traj.samples = times
        .iter()
        .zip(states)
        .map(|(&t, s)| Sample {
            t,
            system: s.clone(),
            state: s,
            trace: 1.0,
        })
        .collect();
    traj
}

/// Unit trace check on a state produced by the nonlinear integrators.
pub fn is_normalized(rho: &ComplexMatrix, tol: f64) -> bool {
    (rho.trace() - ONE).norm() <= tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{compress_probe, hermitian_eig, trace_distance};
    use crate::model::{
        heisenberg3_hamiltonian, pauli, qubit_from_population, qubit_ket, swap_hamiltonian,
        FieldConfig,
    };

    fn up() -> Ket {
        Ket::basis(2, 0)
    }

    #[test]
    fn example1_effective_hamiltonian() {
        let (gamma, omega) = (5.0, 1.0);
        let eff = effective_rank1(&swap_hamiltonian(gamma), &up(), omega).unwrap();
        // γ|↑⟩⟨↑| − i(Ω/2)|↓⟩⟨↓|
        let expected = ComplexMatrix::diag(&[C64::new(gamma, 0.0), C64::new(0.0, -omega / 2.0)]);
        assert!(eff.h_eff().approx_eq(&expected, 1e-14));
    }

    #[test]
    fn decoupled_probe_has_no_decay() {
        let ham = HamiltonianSpec::new(2.0, vec![(pauli(1).unwrap(), ComplexMatrix::identity(2))])
            .unwrap();
        let eff = effective_rank1(&ham, &up(), 1.0).unwrap();
        assert!(eff.h1.approx_eq(&pauli(1).unwrap().scale_real(2.0), 1e-15));
        assert!(eff.h2.max_abs() < 1e-15);
    }

    #[test]
    fn eigenvector_probe_has_zero_covariance() {
        let ham = HamiltonianSpec::new(
            1.5,
            vec![
                (pauli(1).unwrap(), pauli(3).unwrap()),
                (pauli(2).unwrap(), pauli(0).unwrap()),
            ],
        )
        .unwrap();
        let eff = effective_rank1(&ham, &Ket::basis(2, 1), 0.7).unwrap();
        assert!(eff.h2.max_abs() < 1e-15);
        assert!(eff.covariance.unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn rank1_h2_equals_dispersion_form() {
        // H₂ = (τ/2)·D†D with D = (I − C)·H·(I ⊗ |φ⟩)
        let (gamma, omega) = (2.0, 0.8);
        let ham = heisenberg3_hamiltonian(gamma, FieldConfig::LocalXyz);
        let phi = qubit_ket("ud").unwrap();
        let eff = effective_rank1(&ham, &phi, omega).unwrap();
        let h = ham.assemble();
        let c = lift_probe(&phi.projector(), 2);
        let off = ComplexMatrix::identity(8) - &c;
        let dd = compress_probe(&h.matmul(&off).matmul(&h), ham.dims(), &phi).unwrap();
        let tau = omega / (gamma * gamma);
        assert!(eff.h2.approx_eq(&dd.scale_real(tau / 2.0), 1e-12));
        assert!(eff.h2.is_psd(1e-10));
    }

    #[test]
    fn unnormalized_probe_vector_rejected() {
        let r = effective_rank1(&swap_hamiltonian(1.0), &Ket::from_real(&[1.0, 1.0]), 1.0);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn rank_r_collapses_to_rank1() {
        let ham = swap_hamiltonian(3.0);
        let p = Projector::from_kets(&[up()]).unwrap();
        let r = effective_rankr(&ham, &p, 1.2).unwrap();
        let one = effective_rank1(&ham, &up(), 1.2).unwrap();
        assert!(r.h1.approx_eq(&kron(&one.h1, p.matrix()), 1e-14));
        assert!(r.h2.approx_eq(&kron(&one.h2, p.matrix()), 1e-14));
    }

    #[test]
    fn uninformative_projector_leaves_hamiltonian_unchanged() {
        let ham = heisenberg3_hamiltonian(1.0, FieldConfig::GlobalZ);
        let p = Projector::from_matrix(ComplexMatrix::identity(4)).unwrap();
        let eff = effective_rankr(&ham, &p, 2.0).unwrap();
        assert!(eff.h1.approx_eq(&ham.assemble(), 1e-13));
        assert!(eff.h2.max_abs() < 1e-13);
    }

    #[test]
    fn example2_h2_is_psd_and_nonzero() {
        let (gamma, tau) = (5.0, 0.04);
        let omega = gamma * gamma * tau;
        let ham = heisenberg3_hamiltonian(gamma, FieldConfig::LocalXyz);
        let p =
            Projector::from_kets(&[qubit_ket("ud").unwrap(), qubit_ket("du").unwrap()]).unwrap();
        let eff = effective_rankr(&ham, &p, omega).unwrap();
        // oracle: (τ/2)·C H (I − C) H C
        let h = ham.assemble();
        let c = lift_probe(p.matrix(), 2);
        let off = ComplexMatrix::identity(8) - &c;
        let oracle = c
            .matmul(&h)
            .matmul(&off)
            .matmul(&h)
            .matmul(&c)
            .scale_real(tau / 2.0);
        assert!(eff.h2.approx_eq(&oracle, 1e-11));
        let eig = hermitian_eig(&eff.h2).unwrap();
        assert!(eig.values[0] >= -1e-10);
        assert!(*eig.values.last().unwrap() > 1e-3);
    }

    #[test]
    fn kraus_propagation_example1_closed_form() {
        let (gamma, omega, p0) = (5.0, 1.0, 0.2);
        let eff = effective_rank1(&swap_hamiltonian(gamma), &up(), omega).unwrap();
        let init = InitialState::pure(&qubit_from_population(p0), &up()).unwrap();
        let times: Vec<f64> = (0..=40).map(|k| 0.25 * k as f64).collect();
        let traj = propagate_kraus(&eff, &init, &times).unwrap();
        assert_eq!(traj.len(), times.len());
        assert!(traj.samples[0].system.approx_eq(&init.rho_sys, 1e-15));
        let mut prev = f64::INFINITY;
        for s in &traj.samples {
            let closed = p0 / (p0 + (-omega * s.t).exp() * (1.0 - p0));
            assert!((s.p_up() - closed).abs() < 1e-12);
            assert!(s.trace <= prev + 1e-15);
            prev = s.trace;
        }
    }

    #[test]
    fn example1_closed_form_matches_kraus() {
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), 1.0).unwrap();
        let rho0 = crate::linalg::from_bloch([0.3, 0.5, -0.4]);
        let init = InitialState::new(rho0.clone(), up().projector()).unwrap();
        let traj = propagate_kraus(&eff, &init, &[0.0, 1.5, 7.0]).unwrap();
        for s in traj.samples {
            let (rho, trace) = example1_closed_form(5.0, 1.0, &rho0, s.t);
            assert!(rho.approx_eq(&s.system, 1e-12));
            assert!((trace - s.trace).abs() < 1e-12);
        }
    }

    #[test]
    fn kraus_propagation_is_unitary_without_decay() {
        let ham = HamiltonianSpec::new(2.0, vec![(pauli(1).unwrap(), ComplexMatrix::identity(2))])
            .unwrap();
        let eff = effective_rank1(&ham, &up(), 1.0).unwrap();
        let init = InitialState::pure(&qubit_from_population(0.9), &up()).unwrap();
        let traj = propagate_kraus(&eff, &init, &[0.0, 1.0, 5.0]).unwrap();
        for s in traj.samples {
            assert!((s.trace - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kraus_propagation_truncates_at_vanishing_probability() {
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), 1.0).unwrap();
        let init = InitialState::pure(&Ket::basis(2, 1), &up()).unwrap();
        // trace e^{−ΩT} falls below 1e−14 near T ≈ 32.2
        let traj = propagate_kraus(&eff, &init, &[0.0, 10.0, 30.0, 40.0, 50.0]).unwrap();
        assert_eq!(traj.len(), 3);
        let cut = traj.truncated.unwrap();
        assert_eq!(cut.t, 40.0);
    }

    #[test]
    fn rank1_propagation_rejects_wrong_probe_state() {
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), 1.0).unwrap();
        let init = InitialState::pure(&qubit_from_population(0.5), &Ket::basis(2, 1)).unwrap();
        assert!(matches!(
            propagate_kraus(&eff, &init, &[0.0]),
            Err(Error::InvalidInitialState(_))
        ));
    }

    #[test]
    fn density_rhs_cases() {
        // eigenprojector of H₁ with H₂ = 0 is stationary
        let ham = HamiltonianSpec::new(2.0, vec![(pauli(3).unwrap(), ComplexMatrix::identity(2))])
            .unwrap();
        let eff = effective_rank1(&ham, &up(), 1.0).unwrap();
        let rho = ComplexMatrix::diag_real(&[1.0, 0.0]);
        assert!(nonlinear_density_rhs(&eff, &rho).max_abs() < 1e-15);

        // Example 1: ρ = diag(p, 1 − p) gives dp/dT = Ω p (1 − p), the
        // derivative of p/(p + e^{−ΩT}(1 − p)) at T = 0
        let omega = 0.7;
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), omega).unwrap();
        for p in [0.1, 0.5, 0.83] {
            let rhs = nonlinear_density_rhs(&eff, &ComplexMatrix::diag_real(&[p, 1.0 - p]));
            assert!((rhs[(0, 0)].re - omega * p * (1.0 - p)).abs() < 1e-14);
            assert!(rhs.trace().norm() < 1e-14);
        }
    }

    #[test]
    fn state_rhs_cases() {
        let ham = HamiltonianSpec::new(2.0, vec![(pauli(1).unwrap(), ComplexMatrix::identity(2))])
            .unwrap();
        let eff = effective_rank1(&ham, &up(), 1.0).unwrap();
        let psi = qubit_from_population(0.3);
        let expected = eff.h1.apply(&psi).scale(C64::new(0.0, -1.0));
        assert!(nonlinear_state_rhs(&eff, &psi).sub(&expected).norm() < 1e-15);

        // common eigenvector of H₁ and H₂ only picks up a phase
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), 1.0).unwrap();
        let down = Ket::basis(2, 1);
        let rhs = nonlinear_state_rhs(&eff, &down);
        assert!(rhs.norm() < 1e-15); // H₁ eigenvalue 0 on |↓⟩
        let rhs = nonlinear_state_rhs(&eff, &up());
        assert!(rhs.sub(&up().scale(C64::new(0.0, -5.0))).norm() < 1e-15);
    }

    #[test]
    fn state_integration_matches_example1_closed_form() {
        let (gamma, omega, p0) = (5.0, 1.0, 0.2);
        let eff = effective_rank1(&swap_hamiltonian(gamma), &up(), omega).unwrap();
        let psi = integrate_state(&eff, &qubit_from_population(p0), &[4.0], 4.0 / 2000.0);
        let p_up = psi[0][0].norm_sqr();
        let closed = p0 / (p0 + (-omega * 4.0f64).exp() * (1.0 - p0));
        assert!((p_up - closed).abs() < 1e-6);
    }

    #[test]
    fn purity_derivative_special_cases() {
        let eff = effective_rank1(&swap_hamiltonian(5.0), &up(), 1.0).unwrap();
        let pure = qubit_from_population(0.4).projector();
        assert!(purity_derivative(&eff, &pure).abs() < 1e-12);
        assert!(purity_derivative(&eff, &(ComplexMatrix::identity(2) * 0.5)).abs() < 1e-15);
        let ham = HamiltonianSpec::new(2.0, vec![(pauli(1).unwrap(), ComplexMatrix::identity(2))])
            .unwrap();
        let no_decay = effective_rank1(&ham, &up(), 1.0).unwrap();
        let mixed = ComplexMatrix::diag_real(&[0.3, 0.7]);
        assert!(purity_derivative(&no_decay, &mixed).abs() < 1e-15);
    }

    #[test]
    fn density_and_kraus_agree_for_mixed_state() {
        let eff = effective_rank1(&swap_hamiltonian(2.0), &up(), 1.0).unwrap();
        let rho0 = crate::linalg::from_bloch([0.2, -0.1, 0.3]);
        let init = InitialState::new(rho0.clone(), up().projector()).unwrap();
        let times = [0.5, 1.0, 3.0];
        let ode = integrate_density(&eff, &rho0, &times, 1e-3);
        let kraus = propagate_kraus(&eff, &init, &times).unwrap();
        for (a, b) in ode.iter().zip(&kraus.samples) {
            assert!(trace_distance(a, &b.system) < 1e-9);
            assert!(is_normalized(a, 1e-12));
        }
    }
}

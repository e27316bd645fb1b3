//! Stroboscopic limit of non-selective measurements.
//!
//! With H = γh and transition operators h_ij = C_i h C_j the limit dynamics
//! is the semigroup exp(𝓛_eff T) with
//!
//! ```text
//! 𝓛_eff[ρ] = −iγ Σ_i [h_ii, ρ] − (Ω/2) Σ_{i≠j} ({h_ji† h_ji, ρ} − 2 h_ji ρ h_ji†).
//! ```
//!
//! The generator is also assembled a second way, directly from Λ and
//! 𝓛 = −i[h, ·]:
//!
//! ```text
//! γ Λ𝓛Λ + (Ω/2)(Λ𝓛²Λ − Λ𝓛Λ𝓛Λ),
//! ```
//!
//! which equals the Lindblad form composed with Λ. The two agree on every
//! Λ-invariant state and are compared as superoperators in that form.

use crate::error::{Error, Result};
use crate::linalg::{
    expm, hermitian_eig, kron, partial_trace, rk4_sample, superop, ComplexMatrix, Ket, OdeState,
    Subsystem, TensorDims, C64, DEFAULT_TOL, ZERO,
};
use crate::model::{HamiltonianSpec, InitialState, MeasurementSpec, Projector};
use crate::trajectory::{Method, Sample, Trajectory};

#[derive(Clone, Debug)]
pub struct NonselectiveEffective {
    /// Dimensionless Hamiltonian h with H = γh on the measured space.
    pub h: ComplexMatrix,
    pub gamma: f64,
    pub omega: f64,
    /// C_i on the measured space (lifted to I ⊗ P_i for probe measurements).
    pub projectors: Vec<ComplexMatrix>,
    /// transition_ops[i][j] = C_i h C_j.
    pub transition_ops: Vec<Vec<ComplexMatrix>>,
    /// Lindblad-form generator, column-vectorized.
    pub liouvillian: ComplexMatrix,
    /// Generator assembled from Λ and 𝓛 (equals `liouvillian ∘ Λ`).
    pub sandwich_generator: ComplexMatrix,
    /// Λ as a superoperator.
    pub channel: ComplexMatrix,
    /// Orthonormal basis of supp C_i for each block.
    pub block_bases: Vec<Vec<Ket>>,
    /// Block Hamiltonians γh_ii − i(Ω/2)((h²)_ii − h_ii²), on the full space.
    pub block_hamiltonians: Vec<ComplexMatrix>,
    /// Present when the family acts on the probe factor only.
    pub dims: Option<TensorDims>,
}

/// Generator for a complete probe projector family, C_i = I_sys ⊗ P_i.
pub fn build_generator(
    ham: &HamiltonianSpec,
    spec: &MeasurementSpec,
    omega: f64,
) -> Result<NonselectiveEffective> {
    spec.check_complete()?;
    let dims = ham.dims();
    if spec.dim() != dims.pr {
        return Err(Error::DimensionMismatch {
            expected: dims.pr,
            found: spec.dim(),
            context: "projector family vs probe",
        });
    }
    let bases = spec
        .projectors()
        .iter()
        .map(|p| {
            (0..dims.sys)
                .flat_map(|s| {
                    p.basis()
                        .iter()
                        .map(move |k| Ket::basis(dims.sys, s).kron(k))
                })
                .collect()
        })
        .collect();
    let mut eff = assemble(
        ham.dimensionless(),
        ham.gamma,
        omega,
        spec.lifted(dims.sys),
        bases,
    )?;
    eff.dims = Some(dims);
    Ok(eff)
}

/// Generator for a complete projector family on the whole space.
pub fn build_generator_global(
    h: &ComplexMatrix,
    gamma: f64,
    omega: f64,
    projectors: &[Projector],
) -> Result<NonselectiveEffective> {
    let d = h.dim();
    let mut sum = ComplexMatrix::zeros(d);
    for (i, p) in projectors.iter().enumerate() {
        if p.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.dim(),
                context: "projector vs Hamiltonian",
            });
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            if p.matrix().matmul(q.matrix()).max_abs() > DEFAULT_TOL {
                return Err(Error::NotOrthogonal { i, j });
            }
        }
        sum += p.matrix();
    }
    let residual = (sum - ComplexMatrix::identity(d)).max_abs();
    if residual > DEFAULT_TOL {
        return Err(Error::IncompleteFamily { residual });
    }
    let mats = projectors.iter().map(|p| p.matrix().clone()).collect();
    let bases = projectors.iter().map(|p| p.basis().to_vec()).collect();
    assemble(h.clone(), gamma, omega, mats, bases)
}

fn assemble(
    h: ComplexMatrix,
    gamma: f64,
    omega: f64,
    projectors: Vec<ComplexMatrix>,
    block_bases: Vec<Vec<Ket>>,
) -> Result<NonselectiveEffective> {
    if !h.is_hermitian(DEFAULT_TOL) {
        return Err(Error::NotHermitian {
            tol: DEFAULT_TOL,
            context: "dimensionless Hamiltonian",
        });
    }
    let d = h.dim();
    let m = projectors.len();
    let transition_ops: Vec<Vec<ComplexMatrix>> = projectors
        .iter()
        .map(|ci| {
            projectors
                .iter()
                .map(|cj| ci.matmul(&h).matmul(cj))
                .collect()
        })
        .collect();

    let mut h_diag = ComplexMatrix::zeros(d);
    for (i, row) in transition_ops.iter().enumerate() {
        h_diag += &row[i];
    }
    let mut liouvillian = superop::commutator_generator(&h_diag).scale_real(gamma);
    for (i, row) in transition_ops.iter().enumerate() {
        for (j, _) in row.iter().enumerate().filter(|&(j, _)| j != i) {
            let jump = &transition_ops[j][i];
            let jj = jump.dagger().matmul(jump);
            let dissipator = superop::left(&jj) + superop::right(&jj)
                - superop::sandwich(jump, &jump.dagger()).scale_real(2.0);
            liouvillian -= &dissipator.scale_real(0.5 * omega);
        }
    }

    let mut channel = ComplexMatrix::zeros(d * d);
    for c in &projectors {
        channel += &superop::sandwich(c, c);
    }
    let l = superop::commutator_generator(&h);
    let lam_l_lam = channel.matmul(&l).matmul(&channel);
    let second = channel.matmul(&l).matmul(&l).matmul(&channel) - lam_l_lam.matmul(&lam_l_lam);
    let sandwich_generator = lam_l_lam.scale_real(gamma) + second.scale_real(0.5 * omega);

    let h2 = h.matmul(&h);
    let block_hamiltonians = (0..m)
        .map(|i| {
            let hii = &transition_ops[i][i];
            let dispersion = projectors[i].matmul(&h2).matmul(&projectors[i]) - hii.matmul(hii);
            hii.scale_real(gamma) - dispersion.scale(C64::new(0.0, 0.5 * omega))
        })
        .collect();

    let eff = NonselectiveEffective {
        h,
        gamma,
        omega,
        projectors,
        transition_ops,
        liouvillian,
        sandwich_generator,
        channel,
        block_bases,
        block_hamiltonians,
        dims: None,
    };
    eff.verify()?;
    Ok(eff)
}

impl NonselectiveEffective {
    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    pub fn blocks(&self) -> usize {
        self.projectors.len()
    }

    fn scale(&self) -> f64 {
        let hn = self.h.max_abs() * self.dim() as f64;
        1.0f64.max(self.gamma.abs() * hn + self.omega.abs() * hn * hn)
    }

    fn verify(&self) -> Result<()> {
        let tol = DEFAULT_TOL * self.scale();
        let m = self.blocks();
        let check = |what: &'static str, residual: f64, tol: f64| {
            if residual > tol {
                Err(Error::GeneratorMismatch {
                    check: what,
                    residual,
                })
            } else {
                Ok(())
            }
        };
        let mut adj = 0.0f64;
        for i in 0..m {
            for j in 0..m {
                adj = adj.max(
                    (self.transition_ops[i][j].dagger() - &self.transition_ops[j][i]).max_abs(),
                );
            }
        }
        check("h_ij† = h_ji", adj, 1e-12 * self.h.max_abs().max(1.0))?;
        let mixed = ComplexMatrix::identity(self.dim()).scale_real(1.0 / self.dim() as f64);
        check(
            "maximally mixed fixed point",
            self.apply(&mixed).max_abs(),
            tol,
        )?;
        check("generator routes", self.route_residual(), tol)?;
        // Λ𝓛Λ = −i Σ_i [h_ii, ·] on supp Λ
        let mut h_diag = ComplexMatrix::zeros(self.dim());
        for i in 0..m {
            h_diag += &self.transition_ops[i][i];
        }
        let lam_l_lam = self
            .channel
            .matmul(&superop::commutator_generator(&self.h))
            .matmul(&self.channel);
        let expected = superop::commutator_generator(&h_diag).matmul(&self.channel);
        check(
            "first-order sandwich identity",
            (lam_l_lam - expected).max_abs(),
            tol,
        )
    }

    /// Entrywise gap between the sandwich generator and 𝓛_eff ∘ Λ.
    pub fn route_residual(&self) -> f64 {
        (&self.sandwich_generator - &self.liouvillian.matmul(&self.channel)).max_abs()
    }

    /// 𝓛_eff[ρ]
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        superop::apply(&self.liouvillian, rho)
    }

    /// Λ[ρ]
    pub fn project(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.dim());
        for c in &self.projectors {
            out += &rho.sandwich(c);
        }
        out
    }

    /// Jump operators √Ω·h_ji for i ≠ j.
    pub fn jump_operators(&self) -> Vec<ComplexMatrix> {
        let m = self.blocks();
        let mut out = Vec::new();
        for i in 0..m {
            for j in (0..m).filter(|&j| j != i) {
                let op = &self.transition_ops[j][i];
                if op.max_abs() > 0.0 {
                    out.push(op.scale_real(self.omega.sqrt()));
                }
            }
        }
        out
    }

    /// exp(𝓛_eff t) as a superoperator.
    pub fn propagator(&self, t: f64) -> Result<ComplexMatrix> {
        expm(&self.liouvillian.scale_real(t))
    }

    /// Smallest eigenvalue of the Choi matrix of exp(𝓛_eff t).
    pub fn choi_min_eigenvalue(&self, t: f64) -> Result<f64> {
        let choi = superop::choi_matrix(&self.propagator(t)?).hermitian_part();
        Ok(hermitian_eig(&choi)?.values[0])
    }

    /// H_i^eff = γh_ii − i(Ω/2)((h²)_ii − h_ii²), supported in supp C_i.
    pub fn effective_nonhermitian(&self, i: usize) -> Result<&ComplexMatrix> {
        self.block_hamiltonians
            .get(i)
            .ok_or(Error::IndexOutOfRange {
                index: i,
                len: self.blocks(),
                context: "block index",
            })
    }

    /// Restriction of a full-space operator to the basis of block i.
    pub fn restrict(&self, i: usize, op: &ComplexMatrix) -> ComplexMatrix {
        let basis = &self.block_bases[i];
        ComplexMatrix::from_fn(basis.len(), |a, b| op.expectation(&basis[a], &basis[b]))
    }

    /// Embeds a block-basis matrix back into the full space.
    pub fn embed(&self, i: usize, block: &ComplexMatrix) -> ComplexMatrix {
        let basis = &self.block_bases[i];
        let mut out = ComplexMatrix::zeros(self.dim());
        for (a, va) in basis.iter().enumerate() {
            for (b, vb) in basis.iter().enumerate() {
                let x = block[(a, b)];
                if x != ZERO {
                    out += &ComplexMatrix::outer(va, vb).scale(x);
                }
            }
        }
        out
    }

    /// Global version of an initial product state.
    fn initial_operator(&self, init: &InitialState) -> Result<ComplexMatrix> {
        let rho = init.global();
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rho.dim(),
                context: "initial state",
            });
        }
        if !self.project(&rho).approx_eq(&rho, DEFAULT_TOL) {
            return Err(Error::InvalidInitialState("Λ[ρ(0)] = ρ(0)"));
        }
        Ok(rho)
    }
}

/// ρ(T) = exp(𝓛_eff T)[ρ(0)] at each grid time.
pub fn propagate_operator(
    eff: &NonselectiveEffective,
    rho0: &ComplexMatrix,
    times: &[f64],
) -> Result<Vec<ComplexMatrix>> {
    times
        .iter()
        .map(|&t| Ok(superop::apply(&eff.propagator(t)?, rho0)))
        .collect()
}

/// Semigroup propagation of a Λ-invariant initial state; samples carry the
/// reduced system state when the family acts on the probe.
pub fn semigroup_propagate(
    eff: &NonselectiveEffective,
    init: &InitialState,
    times: &[f64],
) -> Result<Trajectory> {
    let rho0 = eff.initial_operator(init)?;
    let states = propagate_operator(eff, &rho0, times)?;
    let mut traj = Trajectory::new(Method::Limit);
    for (&t, state) in times.iter().zip(states) {
        let system = match eff.dims {
            Some(dims) => partial_trace(&state, dims, Subsystem::System)?,
            None => state.clone(),
        };
        let trace = state.trace().re;
        traj.samples.push(Sample {
            t,
            state,
            system,
            trace,
        });
    }
    Ok(traj)
}

/// Per-block density matrices ρ^(i) = C_i ρ C_i in the block bases.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockState {
    pub blocks: Vec<ComplexMatrix>,
}

impl BlockState {
    pub fn from_operator(eff: &NonselectiveEffective, rho: &ComplexMatrix) -> Self {
        Self {
            blocks: (0..eff.blocks()).map(|i| eff.restrict(i, rho)).collect(),
        }
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(ComplexMatrix::dim).collect()
    }

    /// ρ = Σ_i ρ^(i)
    pub fn reassemble(&self, eff: &NonselectiveEffective) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(eff.dim());
        for (i, b) in self.blocks.iter().enumerate() {
            out += &eff.embed(i, b);
        }
        out
    }

    pub fn trace(&self) -> C64 {
        self.blocks.iter().map(ComplexMatrix::trace).sum()
    }
}

impl OdeState for BlockState {
    fn add_scaled(&self, a: f64, k: &Self) -> Self {
        Self {
            blocks: self.blocks.add_scaled(a, &k.blocks),
        }
    }
}

/// dρ^(i)/dT = −i(H_i ρ^(i) − ρ^(i) H_i†) + Ω Σ_{j≠i} h_ij ρ^(j) h_ji
pub fn block_rhs(eff: &NonselectiveEffective, state: &BlockState) -> BlockState {
    let full: Vec<ComplexMatrix> = (0..eff.blocks())
        .map(|j| eff.embed(j, &state.blocks[j]))
        .collect();
    let blocks = (0..eff.blocks())
        .map(|i| {
            let hi = &eff.block_hamiltonians[i];
            let rho = &full[i];
            let mut d = (hi.matmul(rho) - rho.matmul(&hi.dagger())).scale(C64::new(0.0, -1.0));
            for (j, rho_j) in full.iter().enumerate().filter(|&(j, _)| j != i) {
                let feed = eff.transition_ops[i][j]
                    .matmul(rho_j)
                    .matmul(&eff.transition_ops[j][i]);
                d += &feed.scale_real(eff.omega);
            }
            eff.restrict(i, &d)
        })
        .collect();
    BlockState { blocks }
}

/// RK4 integration of the block equations, sampled at `times`.
pub fn integrate_blocks(
    eff: &NonselectiveEffective,
    init: &BlockState,
    times: &[f64],
    max_dt: f64,
) -> Vec<BlockState> {
    rk4_sample(|s: &BlockState| block_rhs(eff, s), init, times, max_dt)
}

/// Classical transition rates of the Pauli equation for a rank-1 family.
#[derive(Clone, Debug, PartialEq)]
pub struct RateMatrix {
    /// rates[i][j] = W_{j→i} = Ω|⟨i|h|j⟩|²; the diagonal is zero.
    pub rates: Vec<Vec<f64>>,
}

impl RateMatrix {
    pub fn dim(&self) -> usize {
        self.rates.len()
    }

    /// W_{from→to}
    pub fn rate(&self, from: usize, to: usize) -> f64 {
        self.rates[to][from]
    }

    /// Σ_{j≠i} W_{i→j}
    pub fn escape_rate(&self, i: usize) -> f64 {
        (0..self.dim())
            .filter(|&j| j != i)
            .map(|j| self.rate(i, j))
            .sum()
    }

    /// dp_i/dT = Σ_{j≠i} (W_{j→i} p_j − W_{i→j} p_i)
    pub fn rhs(&self, p: &[f64]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| {
                (0..self.dim())
                    .filter(|&j| j != i)
                    .map(|j| self.rate(j, i) * p[j] - self.rate(i, j) * p[i])
                    .sum()
            })
            .collect()
    }
}

pub fn pauli_rates(eff: &NonselectiveEffective) -> Result<RateMatrix> {
    for (index, basis) in eff.block_bases.iter().enumerate() {
        if basis.len() != 1 {
            return Err(Error::RankOneRequired {
                index,
                rank: basis.len(),
            });
        }
    }
    let kets: Vec<&Ket> = eff.block_bases.iter().map(|b| &b[0]).collect();
    let m = kets.len();
    let rates = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    if i == j {
                        0.0
                    } else {
                        eff.omega * eff.h.expectation(kets[i], kets[j]).norm_sqr()
                    }
                })
                .collect()
        })
        .collect();
    Ok(RateMatrix { rates })
}

/// RK4 integration of the Pauli equation.
pub fn integrate_pauli(
    rates: &RateMatrix,
    p0: &[f64],
    times: &[f64],
    max_dt: f64,
) -> Vec<Vec<f64>> {
    rk4_sample(|p: &Vec<f64>| rates.rhs(p), &p0.to_vec(), times, max_dt)
}

/// Closed-form system state for γ·SWAP with the probe measured in {|↑⟩, |↓⟩}
/// and prepared in |↑⟩.
pub fn example4_closed_form(gamma: f64, omega: f64, rho0: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let decay = (-2.0 * omega * t).exp();
    let coherence = C64::new(-0.5 * omega * t, -gamma * t).exp();
    let uu = rho0[(0, 0)] + rho0[(1, 1)] * (0.5 * (1.0 - decay));
    let dd = rho0[(1, 1)] * (0.5 * (1.0 + decay));
    ComplexMatrix::from_fn(2, |i, j| match (i, j) {
        (0, 0) => uu,
        (1, 1) => dd,
        (0, 1) => coherence * rho0[(0, 1)],
        _ => coherence.conj() * rho0[(1, 0)],
    })
}

/// Initial global block state ρ_sys ⊗ ρ_pr for a probe family.
pub fn initial_blocks(eff: &NonselectiveEffective, init: &InitialState) -> Result<BlockState> {
    Ok(BlockState::from_operator(eff, &eff.initial_operator(init)?))
}

/// Reduced system state of a block state (probe families only).
pub fn block_system_state(
    eff: &NonselectiveEffective,
    state: &BlockState,
) -> Result<ComplexMatrix> {
    let dims = eff.dims.ok_or(Error::InvalidPlan(
        "reduced system state needs a probe projector family".into(),
    ))?;
    partial_trace(&state.reassemble(eff), dims, Subsystem::System)
}

/// kron(ρ_sys, |k⟩⟨k|) helper for product states with a basis probe.
pub fn with_basis_probe(rho_sys: &ComplexMatrix, dim_pr: usize, k: usize) -> ComplexMatrix {
    kron(rho_sys, &Ket::basis(dim_pr, k).projector())
}

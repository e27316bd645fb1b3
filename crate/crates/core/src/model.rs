//! Hamiltonians in coupling-term form H = γ·Σ_j A_j ⊗ B_j, probe projector
//! families, and factorized initial states.
//!
//! Conventions: tensor order is system ⊗ probe; multi-qubit probes order
//! qubit b before qubit c; |↑⟩ = e₀ and |↓⟩ = e₁.

use log::warn;

use crate::error::{Error, Result};
use crate::linalg::{
    kron, kron_all, lift_probe, ComplexMatrix, Ket, TensorDims, C64, DEFAULT_TOL, I, ONE, ZERO,
};

/// σ₀ = I, σ₁ = σx, σ₂ = σy, σ₃ = σz.
pub fn pauli(index: usize) -> Result<ComplexMatrix> {
    let m = match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_rows(&[vec![ZERO, ONE], vec![ONE, ZERO]])?,
        2 => ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]])?,
        3 => ComplexMatrix::diag_real(&[1.0, -1.0]),
        _ => {
            return Err(Error::IndexOutOfRange {
                index,
                len: 4,
                context: "Pauli operator",
            })
        }
    };
    Ok(m)
}

fn sigma(index: usize) -> ComplexMatrix {
    pauli(index).expect("Pauli index in range")
}

/// A product ket over qubits from a label of `u`/`d` (or `0`/`1`) characters,
/// e.g. `"ud"` = |↑⟩⊗|↓⟩.
pub fn qubit_ket(label: &str) -> Result<Ket> {
    let mut ket: Option<Ket> = None;
    for (pos, ch) in label.chars().enumerate() {
        let single = match ch {
            'u' | 'U' | '0' | '↑' => Ket::basis(2, 0),
            'd' | 'D' | '1' | '↓' => Ket::basis(2, 1),
            _ => {
                return Err(Error::InvalidScenario(format!(
                    "basis label {label:?}: character {pos} ({ch:?}) is not one of u, d, 0, 1"
                )))
            }
        };
        ket = Some(match ket {
            None => single,
            Some(k) => k.kron(&single),
        });
    }
    ket.ok_or_else(|| Error::InvalidScenario("empty basis label".into()))
}

#[derive(Clone, Debug)]
pub struct CouplingTerm {
    pub system: ComplexMatrix,
    pub probe: ComplexMatrix,
}

/// H = γ·Σ_j A_j ⊗ B_j with dimensionless A_j (system) and B_j (probe).
#[derive(Clone, Debug)]
pub struct HamiltonianSpec {
    pub gamma: f64,
    pub terms: Vec<CouplingTerm>,
    dims: TensorDims,
}

impl HamiltonianSpec {
    pub fn new(gamma: f64, terms: Vec<(ComplexMatrix, ComplexMatrix)>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidPlan("Hamiltonian needs at least one term".into()))?;
        let dims = TensorDims::new(first.0.dim(), first.1.dim());
        for (a, b) in &terms {
            if a.dim() != dims.sys {
                return Err(Error::DimensionMismatch {
                    expected: dims.sys,
                    found: a.dim(),
                    context: "system factor A_j",
                });
            }
            if b.dim() != dims.pr {
                return Err(Error::DimensionMismatch {
                    expected: dims.pr,
                    found: b.dim(),
                    context: "probe factor B_j",
                });
            }
        }
        let spec = Self {
            gamma,
            terms: terms
                .into_iter()
                .map(|(system, probe)| CouplingTerm { system, probe })
                .collect(),
            dims,
        };
        let h = spec.dimensionless();
        let tol = DEFAULT_TOL * h.max_abs().max(1.0);
        if !h.is_hermitian(tol) {
            return Err(Error::NotHermitian {
                tol,
                context: "assembled Hamiltonian",
            });
        }
        for (j, t) in spec.terms.iter().enumerate() {
            let (na, nb) = (t.system.op_norm(), t.probe.op_norm());
            if na > 1.0 + DEFAULT_TOL || nb > 1.0 + DEFAULT_TOL {
                warn!("coupling term {j}: operator norms |A|={na:.4}, |B|={nb:.4} exceed the unit-norm convention");
            }
        }
        Ok(spec)
    }

    pub fn dims(&self) -> TensorDims {
        self.dims
    }

    /// h = Σ_j A_j ⊗ B_j, so that H = γ·h.
    pub fn dimensionless(&self) -> ComplexMatrix {
        let mut h = ComplexMatrix::zeros(self.dims.total());
        for t in &self.terms {
            h += &kron(&t.system, &t.probe);
        }
        h
    }

    pub fn assemble(&self) -> ComplexMatrix {
        self.dimensionless().scale_real(self.gamma)
    }

    pub fn with_gamma(&self, gamma: f64) -> Self {
        Self {
            gamma,
            ..self.clone()
        }
    }
}

/// γ·SWAP on two qubits, stored as the four terms (σ_j/√2, σ_j/√2).
pub fn swap_hamiltonian(gamma: f64) -> HamiltonianSpec {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let terms = (0..4)
        .map(|j| (sigma(j).scale_real(s), sigma(j).scale_real(s)))
        .collect();
    HamiltonianSpec::new(gamma, terms).expect("SWAP terms are Hermitian")
}

/// Single-qubit field terms of the three-qubit Heisenberg model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldConfig {
    /// σx on a, σy on b, σz on c.
    LocalXyz,
    /// σz on each of a, b, c.
    GlobalZ,
}

/// γ·(σ⃗ᵃ·σ⃗ᵇ + σ⃗ᵇ·σ⃗ᶜ + σ⃗ᶜ·σ⃗ᵃ + fields) with qubit a as the system and
/// qubits b, c as the probe.
pub fn heisenberg3_hamiltonian(gamma: f64, field: FieldConfig) -> HamiltonianSpec {
    let id = sigma(0);
    let mut terms = Vec::new();
    for k in 1..=3 {
        terms.push((sigma(k), kron(&sigma(k), &id)));
        terms.push((sigma(k), kron(&id, &sigma(k))));
        terms.push((id.clone(), kron(&sigma(k), &sigma(k))));
    }
    let (fa, fb, fc) = match field {
        FieldConfig::LocalXyz => (1, 2, 3),
        FieldConfig::GlobalZ => (3, 3, 3),
    };
    terms.push((sigma(fa), kron(&id, &id)));
    terms.push((id.clone(), kron(&sigma(fb), &id)));
    terms.push((id.clone(), kron(&id, &sigma(fc))));
    HamiltonianSpec::new(gamma, terms).expect("Pauli terms are Hermitian")
}

/// Orthogonal projector with an orthonormal basis of its range.
#[derive(Clone, Debug)]
pub struct Projector {
    matrix: ComplexMatrix,
    basis: Vec<Ket>,
}

impl Projector {
    /// P = Σ_k |k⟩⟨k| for orthonormal kets; basis order follows input order.
    pub fn from_kets(kets: &[Ket]) -> Result<Self> {
        let first = kets
            .first()
            .ok_or_else(|| Error::InvalidPlan("projector needs at least one ket".into()))?;
        let dim = first.dim();
        for (i, a) in kets.iter().enumerate() {
            if a.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: a.dim(),
                    context: "projector ket",
                });
            }
            for (j, b) in kets.iter().enumerate().skip(i) {
                let target = if i == j { ONE } else { ZERO };
                let residual = (a.inner(b) - target).norm();
                if residual > DEFAULT_TOL {
                    return Err(Error::NotOrthonormal { i, j, residual });
                }
            }
        }
        let mut matrix = ComplexMatrix::zeros(dim);
        for k in kets {
            matrix += &k.projector();
        }
        Ok(Self {
            matrix,
            basis: kets.to_vec(),
        })
    }

    /// Accepts any projector matrix; the range basis comes from its
    /// eigenvectors with eigenvalue 1.
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_projector(DEFAULT_TOL) {
            return Err(Error::NotProjector {
                tol: DEFAULT_TOL,
                context: "Projector::from_matrix",
            });
        }
        let eig = crate::linalg::hermitian_eig(&matrix)?;
        let basis = (0..matrix.dim())
            .filter(|&k| eig.values[k] > 0.5)
            .map(|k| eig.vector(k))
            .collect::<Vec<_>>();
        if basis.is_empty() {
            return Err(Error::NotProjector {
                tol: DEFAULT_TOL,
                context: "zero projector",
            });
        }
        Ok(Self { matrix, basis })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn basis(&self) -> &[Ket] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }
}

/// Σ_k |k⟩⟨k| over orthonormal kets.
pub fn projector_from_kets(kets: &[Ket]) -> Result<ComplexMatrix> {
    Projector::from_kets(kets).map(|p| p.matrix)
}

/// Family of mutually orthogonal probe projectors, optionally with a selected
/// (post-selected) outcome.
#[derive(Clone, Debug)]
pub struct MeasurementSpec {
    projectors: Vec<Projector>,
    selected: Option<usize>,
}

impl MeasurementSpec {
    pub fn new(projectors: Vec<Projector>, selected: Option<usize>) -> Result<Self> {
        let first = projectors
            .first()
            .ok_or_else(|| Error::InvalidPlan("measurement needs at least one projector".into()))?;
        let dim = first.dim();
        for (i, p) in projectors.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.dim(),
                    context: "projector dimension",
                });
            }
            for (j, q) in projectors.iter().enumerate().skip(i + 1) {
                if p.matrix().matmul(q.matrix()).max_abs() > DEFAULT_TOL {
                    return Err(Error::NotOrthogonal { i, j });
                }
            }
        }
        if let Some(index) = selected {
            if index >= projectors.len() {
                return Err(Error::IndexOutOfRange {
                    index,
                    len: projectors.len(),
                    context: "selected outcome",
                });
            }
        }
        let spec = Self {
            projectors,
            selected,
        };
        if selected.is_none() {
            spec.check_complete()?;
        }
        Ok(spec)
    }

    /// Selective measurement that post-selects a single projector.
    pub fn selective(projector: Projector) -> Self {
        Self {
            projectors: vec![projector],
            selected: Some(0),
        }
    }

    pub fn nonselective(projectors: Vec<Projector>) -> Result<Self> {
        Self::new(projectors, None)
    }

    pub fn projectors(&self) -> &[Projector] {
        &self.projectors
    }

    pub fn selected_index(&self) -> Option<usize> {
        self.selected
    }

    pub fn selected(&self) -> Option<&Projector> {
        self.selected.map(|i| &self.projectors[i])
    }

    pub fn is_selective(&self) -> bool {
        self.selected.is_some()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(Projector::rank).collect()
    }

    pub fn dim(&self) -> usize {
        self.projectors[0].dim()
    }

    pub fn completeness_residual(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(self.dim());
        for p in &self.projectors {
            sum += p.matrix();
        }
        (sum - ComplexMatrix::identity(self.dim())).max_abs()
    }

    pub fn check_complete(&self) -> Result<()> {
        let residual = self.completeness_residual();
        if residual > DEFAULT_TOL {
            return Err(Error::IncompleteFamily { residual });
        }
        Ok(())
    }

    /// C_i = I_sys ⊗ P_i for every projector.
    pub fn lifted(&self, dim_sys: usize) -> Vec<ComplexMatrix> {
        self.projectors
            .iter()
            .map(|p| lift_probe(p.matrix(), dim_sys))
            .collect()
    }
}

/// Factorized initial state ρ_sys ⊗ ρ_pr.
#[derive(Clone, Debug)]
pub struct InitialState {
    pub rho_sys: ComplexMatrix,
    pub rho_pr: ComplexMatrix,
}

impl InitialState {
    pub fn new(rho_sys: ComplexMatrix, rho_pr: ComplexMatrix) -> Result<Self> {
        if !rho_sys.is_density(DEFAULT_TOL) {
            return Err(Error::NotDensity {
                tol: DEFAULT_TOL,
                context: "initial system state",
            });
        }
        if !rho_pr.is_density(DEFAULT_TOL) {
            return Err(Error::NotDensity {
                tol: DEFAULT_TOL,
                context: "initial probe state",
            });
        }
        Ok(Self { rho_sys, rho_pr })
    }

    pub fn pure(psi_sys: &Ket, phi_pr: &Ket) -> Result<Self> {
        for (k, context) in [
            (psi_sys, "initial system ket"),
            (phi_pr, "initial probe ket"),
        ] {
            if (k.norm() - 1.0).abs() > DEFAULT_TOL {
                return Err(Error::NotNormalized {
                    norm: k.norm(),
                    context,
                });
            }
        }
        Self::new(psi_sys.projector(), phi_pr.projector())
    }

    pub fn dims(&self) -> TensorDims {
        TensorDims::new(self.rho_sys.dim(), self.rho_pr.dim())
    }

    pub fn global(&self) -> ComplexMatrix {
        kron(&self.rho_sys, &self.rho_pr)
    }

    /// supp ρ_pr ⊆ supp P, i.e. P·ρ_pr·P = ρ_pr.
    pub fn check_selective(&self, projector: &Projector) -> Result<()> {
        let p = projector.matrix();
        if p.dim() != self.rho_pr.dim() {
            return Err(Error::DimensionMismatch {
                expected: p.dim(),
                found: self.rho_pr.dim(),
                context: "probe state vs projector",
            });
        }
        if !self.rho_pr.sandwich(p).approx_eq(&self.rho_pr, DEFAULT_TOL) {
            return Err(Error::InvalidInitialState("supp ρ_pr ⊆ supp P_i"));
        }
        Ok(())
    }

    /// Λ[ρ_sys ⊗ ρ_pr] = ρ_sys ⊗ ρ_pr.
    pub fn is_channel_invariant(&self, spec: &MeasurementSpec) -> bool {
        let mut out = ComplexMatrix::zeros(self.rho_pr.dim());
        for p in spec.projectors() {
            out += &self.rho_pr.sandwich(p.matrix());
        }
        out.approx_eq(&self.rho_pr, DEFAULT_TOL)
    }
}

/// Total z-projection Σ_k σ_z^(k) on `n` qubits.
pub fn total_sz(n: usize) -> ComplexMatrix {
    let mut total = ComplexMatrix::zeros(1 << n);
    for k in 0..n {
        let factors: Vec<ComplexMatrix> = (0..n)
            .map(|q| if q == k { sigma(3) } else { sigma(0) })
            .collect();
        total += &kron_all(&factors);
    }
    total
}

/// α|↑⟩ + β|↓⟩ with real non-negative amplitudes from p_up = |α|².
pub fn qubit_from_population(p_up: f64) -> Ket {
    Ket::new(vec![
        C64::new(p_up.sqrt(), 0.0),
        C64::new((1.0 - p_up).max(0.0).sqrt(), 0.0),
    ])
}

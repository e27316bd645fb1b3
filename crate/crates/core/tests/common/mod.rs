//! Seeded random instances shared by the property suites.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stroblim_core::linalg::{expm, hermitian_eig, ComplexMatrix, Ket, C64};
use stroblim_core::model::{HamiltonianSpec, Projector};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn matrix(rng: &mut impl Rng, d: usize, scale: f64) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, |_, _| {
        C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale))
    })
}

pub fn hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    matrix(rng, d, 1.0).hermitian_part()
}

/// Hermitian with operator norm exactly 1 (d ≥ 2) or ±1.
pub fn unit_hermitian(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let h = hermitian(rng, d);
    let n = h.op_norm();
    h.scale_real(if n > 0.0 { 1.0 / n } else { 1.0 })
}

pub fn ket(rng: &mut impl Rng, d: usize) -> Ket {
    let v = Ket::new(
        (0..d)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    );
    v.normalized().expect("nonzero random ket")
}

pub fn density(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    let g = matrix(rng, d, 1.0);
    let rho = g.matmul(&g.dagger());
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

pub fn unitary(rng: &mut impl Rng, d: usize) -> ComplexMatrix {
    expm(&hermitian(rng, d).scale(C64::new(0.0, -3.0))).expect("expm of anti-Hermitian")
}

/// Orthonormal basis from the eigenvectors of a random Hermitian matrix.
pub fn basis(rng: &mut impl Rng, d: usize) -> Vec<Ket> {
    let e = hermitian_eig(&hermitian(rng, d)).expect("Hermitian");
    (0..d).map(|k| e.vector(k)).collect()
}

/// Complete family of `m` orthogonal projectors (each rank ≥ 1) on C^d.
pub fn projector_family(rng: &mut impl Rng, d: usize, m: usize) -> Vec<Projector> {
    assert!(m >= 1 && m <= d);
    let mut kets = basis(rng, d);
    kets.shuffle(rng);
    let mut cuts: Vec<usize> = (1..d).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(m - 1).collect();
    cuts.sort_unstable();
    let mut bounds = vec![0];
    bounds.extend(cuts);
    bounds.push(d);
    bounds
        .windows(2)
        .map(|w| Projector::from_kets(&kets[w[0]..w[1]]).expect("orthonormal"))
        .collect()
}

/// Rank-one family from a random orthonormal basis.
pub fn rank_one_family(rng: &mut impl Rng, d: usize) -> Vec<Projector> {
    basis(rng, d)
        .into_iter()
        .map(|k| Projector::from_kets(&[k]).expect("normalized"))
        .collect()
}

/// Random projector of rank `r` on C^d.
pub fn projector(rng: &mut impl Rng, d: usize, r: usize) -> Projector {
    let kets = basis(rng, d);
    Projector::from_kets(&kets[..r]).expect("orthonormal")
}

/// γ Σ_j A_j ⊗ B_j with unit-norm Hermitian factors.
pub fn hamiltonian(
    rng: &mut impl Rng,
    ds: usize,
    dp: usize,
    terms: usize,
    gamma: f64,
) -> HamiltonianSpec {
    let terms = (0..terms)
        .map(|_| (unit_hermitian(rng, ds), unit_hermitian(rng, dp)))
        .collect();
    HamiltonianSpec::new(gamma, terms).expect("valid random Hamiltonian")
}

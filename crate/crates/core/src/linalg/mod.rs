//! Dense complex linear algebra shared by every dynamics module.

mod eig;
mod expm;
mod matrix;
pub mod ode;
pub mod superop;
mod tensor;

pub use eig::{hermitian_eig, trace_distance, HermitianEig};
pub use expm::{expm, expm_pade};
pub use matrix::{anticommutator, commutator, ComplexMatrix, Ket, C64, DEFAULT_TOL, I, ONE, ZERO};
pub use ode::{rk4_sample, rk4_step, OdeState};
pub use tensor::{
    compress_probe, kron, kron_all, lift_probe, partial_trace, Subsystem, TensorDims,
};

/// Bloch vector (tr ρσx, tr ρσy, tr ρσz) of a 2×2 matrix.
pub fn bloch_vector(rho: &ComplexMatrix) -> [f64; 3] {
    assert_eq!(rho.dim(), 2, "Bloch vector requires a qubit state");
    let r1 = 2.0 * rho[(0, 1)].re;
    let r2 = -2.0 * rho[(0, 1)].im;
    let r3 = (rho[(0, 0)] - rho[(1, 1)]).re;
    [r1, r2, r3]
}

/// (I + r·σ)/2
pub fn from_bloch(r: [f64; 3]) -> ComplexMatrix {
    ComplexMatrix::from_rows(&[
        vec![
            C64::new(0.5 * (1.0 + r[2]), 0.0),
            C64::new(0.5 * r[0], -0.5 * r[1]),
        ],
        vec![
            C64::new(0.5 * r[0], 0.5 * r[1]),
            C64::new(0.5 * (1.0 - r[2]), 0.0),
        ],
    ])
    .expect("2x2 literal")
}

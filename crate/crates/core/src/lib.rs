//! Quantum system–probe dynamics under repeated projective measurements of
//! the probe, and the closed-form dynamics that emerge in the stroboscopic
//! limit τ → 0 with Ω = γ²τ fixed.
//!
//! * [`exact`] composes unitary periods with measurement instruments or the
//!   non-selective channel step by step.
//! * [`selective_limit`] builds the non-Hermitian effective Hamiltonian
//!   H₁ − iH₂ for post-selected outcomes and integrates the resulting
//!   nonlinear equations.
//! * [`nonselective_limit`] builds the Lindblad generator for discarded
//!   outcomes, its block form, and the classical Pauli reduction.
//! * [`experiments`] reproduces the worked two- and three-qubit examples and
//!   the τ-convergence studies.

pub mod error;
pub mod exact;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod nonselective_limit;
pub mod selective_limit;
pub mod trajectory;

pub use error::{Error, Result};

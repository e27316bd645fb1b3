//! Superoperators on column-vectorized d×d matrices.
//!
//! vec(X) stacks columns, so vec(A·X·B) = (Bᵀ ⊗ A)·vec(X). A superoperator is
//! stored as a d²×d² [`ComplexMatrix`].

use super::matrix::{ComplexMatrix, C64, I, ZERO};
use super::tensor::kron;

pub fn vectorize(x: &ComplexMatrix) -> Vec<C64> {
    let d = x.dim();
    let mut v = Vec::with_capacity(d * d);
    for j in 0..d {
        for i in 0..d {
            v.push(x[(i, j)]);
        }
    }
    v
}

pub fn unvectorize(v: &[C64]) -> ComplexMatrix {
    let d = (v.len() as f64).sqrt().round() as usize;
    assert_eq!(d * d, v.len(), "vector length must be a perfect square");
    ComplexMatrix::from_fn(d, |i, j| v[j * d + i])
}

/// Superoperator of X ↦ a·X·b.
pub fn sandwich(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    kron(&b.transpose(), a)
}

/// Superoperator of X ↦ a·X.
pub fn left(a: &ComplexMatrix) -> ComplexMatrix {
    sandwich(a, &ComplexMatrix::identity(a.dim()))
}

/// Superoperator of X ↦ X·b.
pub fn right(b: &ComplexMatrix) -> ComplexMatrix {
    sandwich(&ComplexMatrix::identity(b.dim()), b)
}

/// Superoperator of X ↦ −i[h, X].
pub fn commutator_generator(h: &ComplexMatrix) -> ComplexMatrix {
    (left(h) - right(h)).scale(-I)
}

pub fn apply(superop: &ComplexMatrix, x: &ComplexMatrix) -> ComplexMatrix {
    let v = vectorize(x);
    let n = v.len();
    assert_eq!(superop.dim(), n, "superoperator dimension mismatch");
    let out: Vec<C64> = (0..n)
        .map(|r| {
            let mut acc = ZERO;
            for (c, &x) in v.iter().enumerate() {
                acc += superop[(r, c)] * x;
            }
            acc
        })
        .collect();
    unvectorize(&out)
}

/// Choi matrix J = Σ_ab |a⟩⟨b| ⊗ Φ(|a⟩⟨b|); Φ is completely positive iff J ⪰ 0.
pub fn choi_matrix(superop: &ComplexMatrix) -> ComplexMatrix {
    let d = (superop.dim() as f64).sqrt().round() as usize;
    assert_eq!(d * d, superop.dim());
    ComplexMatrix::from_fn(d * d, |r, c| {
        let (a, k) = (r / d, r % d);
        let (b, l) = (c / d, c % d);
        // column of vec(|a⟩⟨b|) is a + b·d; row of entry (k, l) is k + l·d
        superop[(k + l * d, a + b * d)]
    })
}

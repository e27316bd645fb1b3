//! Hermitian eigendecomposition, backed by nalgebra's symmetric eigensolver.

use nalgebra::{DMatrix, SymmetricEigen};

use super::matrix::{ComplexMatrix, C64, DEFAULT_TOL};
use crate::error::{Error, Result};

/// a = V·diag(values)·V† with `values` ascending and the eigenvectors stored
/// as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEig {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = ComplexMatrix::diag_real(&self.values);
        self.vectors.matmul(&d).matmul(&self.vectors.dagger())
    }

    /// V·diag(f(λ))·V†
    pub fn map_values(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&l| f(l)).collect();
        let v = &self.vectors;
        ComplexMatrix::from_fn(n, |i, j| {
            (0..n).map(|k| v[(i, k)] * fv[k] * v[(j, k)].conj()).sum()
        })
    }

    pub fn vector(&self, k: usize) -> super::Ket {
        let n = self.values.len();
        super::Ket::new((0..n).map(|i| self.vectors[(i, k)]).collect())
    }
}

pub(crate) fn to_nalgebra(a: &ComplexMatrix) -> DMatrix<C64> {
    let n = a.dim();
    DMatrix::from_fn(n, n, |i, j| a[(i, j)])
}

pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), |i, j| m[(i, j)])
}

/// Eigendecomposition of a Hermitian matrix (checked at the default 1e−10
/// tolerance, scaled by the matrix magnitude).
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEig> {
    let tol = DEFAULT_TOL * a.max_abs().max(1.0);
    if !a.is_hermitian(tol) {
        return Err(Error::NotHermitian {
            tol,
            context: "hermitian_eig",
        });
    }
    let eig = SymmetricEigen::try_new(to_nalgebra(&a.hermitian_part()), f64::EPSILON, 100_000)
        .ok_or(Error::EigNonConvergence)?;
    let n = a.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(HermitianEig { values, vectors })
}

/// ½‖a − b‖₁ for Hermitian a, b.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let diff = (a - b).hermitian_part();
    match hermitian_eig(&diff) {
        Ok(e) => 0.5 * e.values.iter().map(|l| l.abs()).sum::<f64>(),
        Err(_) => f64::INFINITY,
    }
}

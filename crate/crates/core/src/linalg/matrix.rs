//! Dense square complex matrices and state vectors.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default absolute tolerance for structural predicates.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Square complex matrix stored densely in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(dim >= 1, "matrix dimension must be positive");
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from row-major entries; fails unless `data.len()` is a
    /// positive perfect square.
    pub fn from_row_major(data: Vec<C64>) -> Result<Self> {
        let dim = (data.len() as f64).sqrt().round() as usize;
        if dim == 0 || dim * dim != data.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
                context: "row-major entries must form a square matrix",
            });
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: bad.len(),
                context: "row length",
            });
        }
        Self::from_row_major(rows.concat())
    }

    /// Convenience constructor for real-valued literals.
    pub fn from_real(dim: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self {
            dim,
            data: entries.iter().map(|&x| C64::new(x, 0.0)).collect(),
        }
    }

    pub fn diag(values: &[C64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m[(i, i)] = v;
        }
        m
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let values: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
        Self::diag(&values)
    }

    /// |a><b|
    pub fn outer(a: &Ket, b: &Ket) -> Self {
        assert_eq!(a.dim(), b.dim());
        Self::from_fn(a.dim(), |i, j| a[i] * b[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &C64> {
        self.data.iter()
    }

    pub fn dagger(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.map(|z| z * c)
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "matmul dimension mismatch");
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let row = &rhs.data[k * n..(k + 1) * n];
                let acc = &mut out[i * n..(i + 1) * n];
                for (o, &b) in acc.iter_mut().zip(row) {
                    *o += a * b;
                }
            }
        }
        Self { dim: n, data: out }
    }

    /// k·self·k†
    pub fn sandwich(&self, k: &Self) -> Self {
        k.matmul(self).matmul(&k.dagger())
    }

    pub fn apply(&self, v: &Ket) -> Ket {
        assert_eq!(self.dim, v.dim(), "matrix-vector dimension mismatch");
        let n = self.dim;
        Ket::new(
            (0..n)
                .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
                .collect(),
        )
    }

    /// <a|self|b>
    pub fn expectation(&self, a: &Ket, b: &Ket) -> C64 {
        a.inner(&self.apply(b))
    }

    pub fn powi(&self, n: u32) -> Self {
        let mut result = Self::identity(self.dim);
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = result.matmul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.matmul(&base);
            }
        }
        result
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Induced 1-norm (maximum absolute column sum).
    pub fn norm_one(&self) -> f64 {
        (0..self.dim)
            .map(|j| (0..self.dim).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Operator (spectral) norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        let gram = self.dagger().matmul(self).hermitian_part();
        match super::hermitian_eig(&gram) {
            Ok(eig) => eig.values.last().copied().unwrap_or(0.0).max(0.0).sqrt(),
            Err(_) => self.frobenius_norm(),
        }
    }

    /// (self + self†)/2
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim)
            .all(|i| (i..self.dim).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Hermitian with smallest eigenvalue ≥ −tol.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && self.min_eigenvalue().is_some_and(|l| l >= -tol)
    }

    /// X² = X = X†
    pub fn is_projector(&self, tol: f64) -> bool {
        self.is_hermitian(tol) && (&self.matmul(self) - self).max_abs() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        (&self.dagger().matmul(self) - &Self::identity(self.dim)).max_abs() <= tol
    }

    pub fn is_density(&self, tol: f64) -> bool {
        (self.trace() - ONE).norm() <= tol && self.is_psd(tol)
    }

    /// Smallest eigenvalue of the Hermitian part; `None` if the solver fails.
    pub fn min_eigenvalue(&self) -> Option<f64> {
        super::hermitian_eig(&self.hermitian_part())
            .ok()
            .and_then(|e| e.values.first().copied())
    }

    /// tr(self²) for a Hermitian matrix.
    pub fn purity(&self) -> f64 {
        self.matmul(self).trace().re
    }

    /// Real part of the diagonal.
    pub fn diagonal_real(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self[(i, i)].re).collect()
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && (self - other).max_abs() <= tol
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

macro_rules! elementwise_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                assert_eq!(self.dim, rhs.dim, "dimension mismatch");
                ComplexMatrix {
                    dim: self.dim,
                    data: self.data.iter().zip(&rhs.data).map(|(a, b)| a $op b).collect(),
                }
            }
        }
        impl $trait<ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                &self $op &rhs
            }
        }
        impl $trait<&ComplexMatrix> for ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: &ComplexMatrix) -> ComplexMatrix {
                &self $op rhs
            }
        }
        impl $trait<ComplexMatrix> for &ComplexMatrix {
            type Output = ComplexMatrix;
            fn $method(self, rhs: ComplexMatrix) -> ComplexMatrix {
                self $op &rhs
            }
        }
    };
}

elementwise_op!(Add, add, +);
elementwise_op!(Sub, sub, -);

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

impl Mul<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: ComplexMatrix) -> ComplexMatrix {
        self.matmul(&rhs)
    }
}

impl Mul<&ComplexMatrix> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, c: C64) -> ComplexMatrix {
        self.scale(c)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, c: C64) -> ComplexMatrix {
        self.scale(c)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, c: f64) -> ComplexMatrix {
        self.scale_real(c)
    }
}

impl Mul<f64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, c: f64) -> ComplexMatrix {
        self.scale_real(c)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.map(|z| -z)
    }
}

/// [a, b]
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b) - b.matmul(a)
}

/// {a, b}
pub fn anticommutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.matmul(b) + b.matmul(a)
}

/// Column vector of complex amplitudes.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket(Vec<C64>);

impl Ket {
    pub fn new(amplitudes: Vec<C64>) -> Self {
        assert!(!amplitudes.is_empty(), "ket must have positive dimension");
        Self(amplitudes)
    }

    pub fn from_real(amplitudes: &[f64]) -> Self {
        Self::new(amplitudes.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Computational basis vector e_index.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    /// <self|other>
    pub fn inner(&self, other: &Ket) -> C64 {
        assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(&self) -> Option<Ket> {
        let n = self.norm();
        (n > 0.0).then(|| self.scale(C64::new(1.0 / n, 0.0)))
    }

    pub fn scale(&self, c: C64) -> Ket {
        Ket(self.0.iter().map(|&z| z * c).collect())
    }

    pub fn add(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Ket) -> Ket {
        assert_eq!(self.dim(), other.dim());
        Ket(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// self ⊗ other
    pub fn kron(&self, other: &Ket) -> Ket {
        let mut v = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.0 {
            for b in &other.0 {
                v.push(a * b);
            }
        }
        Ket(v)
    }

    /// |self><self|
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(self, self)
    }
}

impl Index<usize> for Ket {
    type Output = C64;
    fn index(&self, i: usize) -> &C64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for Ket {
    fn index_mut(&mut self, i: usize) -> &mut C64 {
        &mut self.0[i]
    }
}

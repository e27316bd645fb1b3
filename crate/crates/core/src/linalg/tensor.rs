//! Tensor-product structure: Kronecker products and partial traces over a
//! bipartite system ⊗ probe space.

use super::matrix::{ComplexMatrix, Ket, ZERO};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TensorDims {
    pub sys: usize,
    pub pr: usize,
}

impl TensorDims {
    pub fn new(sys: usize, pr: usize) -> Self {
        assert!(
            sys >= 1 && pr >= 1,
            "tensor factors must have positive dimension"
        );
        Self { sys, pr }
    }

    pub fn total(&self) -> usize {
        self.sys * self.pr
    }

    pub fn check(&self, m: &ComplexMatrix, context: &'static str) -> Result<()> {
        if m.dim() != self.total() {
            return Err(Error::DimensionMismatch {
                expected: self.total(),
                found: m.dim(),
                context,
            });
        }
        Ok(())
    }
}

/// Which factor survives a partial trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    System,
    Probe,
}

/// a ⊗ b with entry[(i·db + k), (j·db + l)] = a[i,j]·b[k,l].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (da, db) = (a.dim(), b.dim());
    ComplexMatrix::from_fn(da * db, |r, c| {
        let (i, k) = (r / db, r % db);
        let (j, l) = (c / db, c % db);
        a[(i, j)] * b[(k, l)]
    })
}

pub fn kron_all<'a>(factors: impl IntoIterator<Item = &'a ComplexMatrix>) -> ComplexMatrix {
    let mut iter = factors.into_iter();
    let first = iter
        .next()
        .expect("kron_all needs at least one factor")
        .clone();
    iter.fold(first, |acc, f| kron(&acc, f))
}

/// Traces out the factor not named by `keep`.
pub fn partial_trace(
    rho: &ComplexMatrix,
    dims: TensorDims,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    dims.check(rho, "partial_trace")?;
    let (ds, dp) = (dims.sys, dims.pr);
    let out = match keep {
        Subsystem::System => ComplexMatrix::from_fn(ds, |i, j| {
            (0..dp).map(|k| rho[(i * dp + k, j * dp + k)]).sum()
        }),
        Subsystem::Probe => ComplexMatrix::from_fn(dp, |k, l| {
            (0..ds).map(|i| rho[(i * dp + k, i * dp + l)]).sum()
        }),
    };
    Ok(out)
}

/// (I_sys ⊗ <φ|) X (I_sys ⊗ |φ>), the compression of a global operator onto a
/// fixed probe vector.
pub fn compress_probe(x: &ComplexMatrix, dims: TensorDims, phi: &Ket) -> Result<ComplexMatrix> {
    dims.check(x, "compress_probe")?;
    if phi.dim() != dims.pr {
        return Err(Error::DimensionMismatch {
            expected: dims.pr,
            found: phi.dim(),
            context: "compress_probe probe vector",
        });
    }
    let dp = dims.pr;
    Ok(ComplexMatrix::from_fn(dims.sys, |i, j| {
        let mut acc = ZERO;
        for k in 0..dp {
            for l in 0..dp {
                acc += phi[k].conj() * x[(i * dp + k, j * dp + l)] * phi[l];
            }
        }
        acc
    }))
}

/// I_sys ⊗ p
pub fn lift_probe(p: &ComplexMatrix, dim_sys: usize) -> ComplexMatrix {
    kron(&ComplexMatrix::identity(dim_sys), p)
}

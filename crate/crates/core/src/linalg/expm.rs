//! Matrix exponential.
//!
//! General matrices use scaling and squaring with diagonal Padé approximants
//! of degree 3, 5, 7, 9 or 13, selected by the 1-norm (Higham 2005).
//! Hermitian and anti-Hermitian inputs go through the eigendecomposition.

use super::eig::{from_nalgebra, hermitian_eig, to_nalgebra};
use super::matrix::{ComplexMatrix, C64, I};
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const PADE_3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE_5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE_7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE_9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE_13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Squarings beyond this indicate an input far outside the range where the
/// result is representable.
const MAX_SQUARINGS: i32 = 60;

/// Structural tolerance for routing to the eigendecomposition path.
const NORMAL_TOL: f64 = 1e-14;

pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ExpmNonConvergence(
            "input has non-finite entries".into(),
        ));
    }
    let scale = a.max_abs().max(1.0);
    if a.is_hermitian(NORMAL_TOL * scale) {
        let eig = hermitian_eig(a)?;
        return Ok(eig.map_values(|l| C64::new(l.exp(), 0.0)));
    }
    let ia = a.scale(I);
    if ia.is_hermitian(NORMAL_TOL * scale) {
        // a = −i·h with h = i·a Hermitian
        let eig = hermitian_eig(&ia)?;
        return Ok(eig.map_values(|l| C64::new(0.0, -l).exp()));
    }
    expm_pade(a)
}

/// Scaling-and-squaring Padé exponential, without the eigen shortcut.
pub fn expm_pade(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let norm = a.norm_one();
    if !norm.is_finite() {
        return Err(Error::ExpmNonConvergence("input norm is not finite".into()));
    }
    let ident = ComplexMatrix::identity(n);
    let a2 = a.matmul(a);

    for &(m, theta) in &THETA {
        if norm <= theta {
            let coeffs: &[f64] = match m {
                3 => &PADE_3,
                5 => &PADE_5,
                7 => &PADE_7,
                _ => &PADE_9,
            };
            let mut u = ComplexMatrix::zeros(n);
            let mut v = ComplexMatrix::zeros(n);
            let mut power = ident.clone();
            for k in (0..=m).step_by(2) {
                v += &power.scale_real(coeffs[k]);
                u += &power.scale_real(coeffs[k + 1]);
                power = power.matmul(&a2);
            }
            let u = a.matmul(&u);
            return pade_solve(&u, &v);
        }
    }

    let s = if norm > THETA_13 {
        (norm / THETA_13).log2().ceil() as i32
    } else {
        0
    };
    if s > MAX_SQUARINGS {
        return Err(Error::ExpmNonConvergence(format!(
            "1-norm {norm:e} requires {s} squarings"
        )));
    }
    let scaled = a.scale_real(0.5f64.powi(s));
    let b = &PADE_13;
    let a2 = scaled.matmul(&scaled);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);
    let inner_u = a6.matmul(&(a6.scale_real(b[13]) + a4.scale_real(b[11]) + a2.scale_real(b[9])))
        + a6.scale_real(b[7])
        + a4.scale_real(b[5])
        + a2.scale_real(b[3])
        + ident.scale_real(b[1]);
    let u = scaled.matmul(&inner_u);
    let v = a6.matmul(&(a6.scale_real(b[12]) + a4.scale_real(b[10]) + a2.scale_real(b[8])))
        + a6.scale_real(b[6])
        + a4.scale_real(b[4])
        + a2.scale_real(b[2])
        + ident.scale_real(b[0]);
    let mut r = pade_solve(&u, &v)?;
    for _ in 0..s {
        r = r.matmul(&r);
    }
    if r.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::ExpmNonConvergence("result overflowed".into()));
    }
    Ok(r)
}

/// Solves (V − U)·R = (V + U).
fn pade_solve(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let p = to_nalgebra(&(v + u));
    let q = to_nalgebra(&(v - u));
    q.lu()
        .solve(&p)
        .map(|r| from_nalgebra(&r))
        .ok_or_else(|| Error::ExpmNonConvergence("Padé denominator is singular".into()))
}

//! Fixed-step classical fourth-order Runge–Kutta.

use super::matrix::{ComplexMatrix, Ket};

/// A state that supports y + a·k.
pub trait OdeState: Clone {
    fn add_scaled(&self, a: f64, k: &Self) -> Self;
}

impl OdeState for ComplexMatrix {
    fn add_scaled(&self, a: f64, k: &Self) -> Self {
        self + &k.scale_real(a)
    }
}

impl OdeState for Ket {
    fn add_scaled(&self, a: f64, k: &Self) -> Self {
        Ket::new(
            self.as_slice()
                .iter()
                .zip(k.as_slice())
                .map(|(y, k)| y + k * a)
                .collect(),
        )
    }
}

impl OdeState for Vec<f64> {
    fn add_scaled(&self, a: f64, k: &Self) -> Self {
        self.iter().zip(k).map(|(y, k)| y + a * k).collect()
    }
}

impl<S: OdeState> OdeState for Vec<S> {
    fn add_scaled(&self, a: f64, k: &Self) -> Self {
        self.iter()
            .zip(k)
            .map(|(y, k)| y.add_scaled(a, k))
            .collect()
    }
}

/// One RK4 step of dy/dt = rhs(y) (autonomous).
pub fn rk4_step<S: OdeState>(rhs: impl Fn(&S) -> S, y: &S, dt: f64) -> S {
    let k1 = rhs(y);
    let k2 = rhs(&y.add_scaled(0.5 * dt, &k1));
    let k3 = rhs(&y.add_scaled(0.5 * dt, &k2));
    let k4 = rhs(&y.add_scaled(dt, &k3));
    y.add_scaled(dt / 6.0, &k1)
        .add_scaled(dt / 3.0, &k2)
        .add_scaled(dt / 3.0, &k3)
        .add_scaled(dt / 6.0, &k4)
}

/// Integrates from t = 0 and returns the state at each requested time.
/// `times` must be non-decreasing; each interval is covered by whole steps
/// of size at most `max_dt`.
pub fn rk4_sample<S: OdeState>(
    rhs: impl Fn(&S) -> S,
    y0: &S,
    times: &[f64],
    max_dt: f64,
) -> Vec<S> {
    assert!(max_dt > 0.0, "step size must be positive");
    let mut out = Vec::with_capacity(times.len());
    let mut y = y0.clone();
    let mut t = 0.0;
    for &target in times {
        assert!(target >= t - 1e-12, "sample times must be non-decreasing");
        let span = target - t;
        if span > 0.0 {
            let steps = (span / max_dt).ceil().max(1.0) as usize;
            let dt = span / steps as f64;
            for _ in 0..steps {
                y = rk4_step(&rhs, &y, dt);
            }
        }
        t = target.max(t);
        out.push(y.clone());
    }
    out
}

//! Fixed-step classical Runge-Kutta.

use std::ops::{Add, Mul};

/// A state that can be advanced by [`rk4_step`]: closed under addition and
/// scaling by a step size.
pub trait OdeState: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn is_finite(&self) -> bool;
}

impl OdeState for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

/// One classical 4th-order Runge-Kutta step of `dx/dt = f(x)`.
///
/// Returns `None` when the result is not finite.
pub fn rk4_step<S, F>(x: S, dt: f64, mut f: F) -> Option<S>
where
    S: OdeState,
    F: FnMut(S) -> S,
{
    let k1 = f(x);
    let k2 = f(x + k1 * (0.5 * dt));
    let k3 = f(x + k2 * (0.5 * dt));
    let k4 = f(x + k3 * dt);
    let next = x + (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (dt / 6.0);
    next.is_finite().then_some(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn decay_error(dt: f64) -> f64 {
        let x = rk4_step(1.0, dt, |x: f64| -x).unwrap();
        (x - (-dt).exp()).abs()
    }

    #[test]
    fn single_step_on_exponential_decay() {
        assert!(decay_error(0.1) < 1e-7);
    }

    #[test]
    fn local_error_is_fifth_order() {
        // one-step (local) error is O(dt^5): halving dt divides it by ~32
        let ratio = decay_error(0.1) / decay_error(0.05);
        assert!(ratio > 16.0, "ratio {ratio}");
    }

    #[test]
    fn fixed_point_is_preserved() {
        let x = rk4_step(3.0, 0.01, |_: f64| 0.0).unwrap();
        assert_eq!(x, 3.0);
    }

    #[test]
    fn non_finite_is_rejected() {
        assert!(rk4_step(1.0, 1.0, |x: f64| x * f64::MAX).is_none());
    }
}

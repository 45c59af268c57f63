use serde::{Deserialize, Serialize};

use super::{OdeError, Params};
use crate::Real;

/// A point of the profile curve parametrised by arc length.
///
/// The tangent angle is stored as `turn = theta - pi/2`, the rotation
/// from the launch direction `(0, 1)`. Near the launch `theta` is within a
/// rounding error of `pi/2`, and keeping the offset avoids losing the
/// deviation entirely for very small initial heights. `theta` is unwrapped:
/// it changes continuously along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveState<T> {
    pub s: T,
    pub x: T,
    pub z: T,
    pub turn: T,
}

/// Right-hand side of the profile system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivs<T> {
    pub dx_ds: T,
    pub dz_ds: T,
    pub dtheta_ds: T,
}

impl<T: Real> CurveState<T> {
    pub fn new(s: T, x: T, z: T, turn: T) -> Self {
        CurveState { s, x, z, turn }
    }

    pub fn from_theta(s: T, x: T, z: T, theta: T) -> Self {
        CurveState { s, x, z, turn: theta - T::FRAC_PI_2() }
    }

    #[inline]
    pub fn theta(&self) -> T {
        T::FRAC_PI_2() + self.turn
    }

    /// `dx/ds = cos(theta)`.
    #[inline]
    pub fn cos_theta(&self) -> T {
        -self.turn.sin()
    }

    /// `dz/ds = sin(theta)`.
    #[inline]
    pub fn sin_theta(&self) -> T {
        self.turn.cos()
    }

    pub fn point(&self) -> (T, T) {
        (self.x, self.z)
    }
}

/// Tangent-angle form of the rotational lambda-hypersurface equation:
/// `theta' = lambda + x sin(theta) - (z - (n-1)/z) cos(theta)`.
pub fn rhs<T: Real>(state: &CurveState<T>, p: &Params<T>) -> Result<Derivs<T>, OdeError> {
    if !(state.z > T::zero()) {
        return Err(OdeError::AxisSingularity { z: state.z.f64() });
    }
    Ok(rhs_unchecked(state.x, state.z, state.turn, p.lambda, p.dim() - T::one()))
}

#[inline]
pub(crate) fn rhs_unchecked<T: Real>(x: T, z: T, turn: T, lambda: T, n_minus_1: T) -> Derivs<T> {
    let (s, c) = turn.sin_cos();
    // cos(theta) = -sin(turn), sin(theta) = cos(turn)
    Derivs {
        dx_ds: -s,
        dz_ds: c,
        dtheta_ds: lambda + x * c + (z - n_minus_1 / z) * s,
    }
}

/// Residual of the profile equation for a point with prescribed curvature
/// `dtheta_ds`; zero exactly when the point satisfies the equation.
pub fn equation_residual<T: Real>(state: &CurveState<T>, dtheta_ds: T, p: &Params<T>) -> Result<T, OdeError> {
    let d = rhs(state, p)?;
    Ok(dtheta_ds - d.dtheta_ds)
}

/// First and second derivative of the local graph `x = g(z)` through the
/// point: `g' = cos/sin` and `g'' = -theta'/sin^3`.
pub fn chart_derivatives<T: Real>(state: &CurveState<T>, p: &Params<T>) -> Result<(T, T), OdeError> {
    let d = rhs(state, p)?;
    chart_from_angle(state, d.dtheta_ds)
}

/// As [`chart_derivatives`], with the curvature supplied by the caller.
pub fn chart_from_angle<T: Real>(state: &CurveState<T>, dtheta_ds: T) -> Result<(T, T), OdeError> {
    let sin = state.sin_theta();
    if sin.abs() < T::of(1e-12) {
        return Err(OdeError::VerticalTangent { sin_theta: sin.f64() });
    }
    let slope = state.cos_theta() / sin;
    let second = -dtheta_ds / (sin * sin * sin);
    Ok((slope, second))
}

/// Taylor launch off the axis: the state at arc length `s` of the curve that
/// leaves `(b, 0)` perpendicularly, to second order.
///
/// `x = b - (b+lambda)/(2n) s^2`, `z = s`, `theta = pi/2 + (b+lambda)/n s`.
/// The curvature at the axis, `(b+lambda)/n`, is the value for which the
/// singular term `(n-1) cos(theta)/z` stays bounded.
pub fn series_state<T: Real>(b: T, s: T, p: &Params<T>) -> CurveState<T> {
    let k = (b + p.lambda) / p.dim();
    CurveState {
        s,
        x: b - k * s * s / T::two(),
        z: s,
        turn: k * s,
    }
}

/// Launch state at `s = axis_eps * max(1, b)`.
pub fn axis_series_start<T: Real>(b: T, p: &Params<T>) -> CurveState<T> {
    series_state(b, p.launch_offset(b), p)
}

/// Curvature at the axis, `theta'(0) = (b + lambda)/n`.
pub fn axis_curvature<T: Real>(b: T, p: &Params<T>) -> T {
    (b + p.lambda) / p.dim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn p(n: u32, lambda: f64) -> Params<f64> {
        Params::new(n, lambda).unwrap()
    }

    #[test]
    fn sphere_curvature() {
        let st = CurveState::from_theta(0.0, SQRT_2 * FRAC_PI_4.cos(), SQRT_2 * FRAC_PI_4.sin(), FRAC_PI_2 + FRAC_PI_4);
        let d = rhs(&st, &p(2, 0.0)).unwrap();
        assert!((d.dtheta_ds - 1.0 / SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn cylinder_is_straight() {
        let st = CurveState::from_theta(0.0, -1.0, 1.0, PI);
        let d = rhs(&st, &p(2, 0.0)).unwrap();
        assert!(d.dtheta_ds.abs() < 1e-15);
        assert!((d.dx_ds + 1.0).abs() < 1e-15);
    }

    #[test]
    fn direct_substitution() {
        let st = CurveState::from_theta(0.0, 1.0, 2.0, FRAC_PI_2);
        let d = rhs(&st, &p(2, -0.1)).unwrap();
        assert!((d.dtheta_ds - 0.9).abs() < 1e-15);
    }

    #[test]
    fn axis_is_singular() {
        let st = CurveState::new(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(rhs(&st, &p(2, 0.0)), Err(OdeError::AxisSingularity { .. })));
        let st = CurveState::new(0.0, 1.0, -1.0, 0.0);
        assert!(matches!(equation_residual(&st, 0.0, &p(2, 0.0)), Err(OdeError::AxisSingularity { .. })));
    }

    #[test]
    fn residuals_on_exact_solutions() {
        let q = p(2, 0.0);
        let a = q.sphere_radius();
        let sphere = CurveState::from_theta(0.0, 0.3 * a, a * (1.0f64 - 0.09).sqrt(), FRAC_PI_2 + (0.3f64).acos());
        let r = equation_residual(&sphere, 1.0 / a, &q).unwrap();
        assert!(r.abs() < 1e-12, "{r}");
        let cyl = CurveState::from_theta(0.0, 3.0, 1.0, PI);
        assert!(equation_residual(&cyl, 0.0, &q).unwrap().abs() < 1e-12);
        // wrong curvature at the top of the circle: the term (z - 1/z) cos(pi) survives
        let top = CurveState::from_theta(0.0, 0.0, SQRT_2, PI);
        let r = equation_residual(&top, 0.0, &q).unwrap();
        assert!((r + 1.0 / SQRT_2).abs() < 1e-14, "{r}");
    }

    #[test]
    fn chart_signs_and_values() {
        let st = CurveState::from_theta(0.0, 0.0, 1.0, 3.0 * FRAC_PI_4);
        let (slope, second) = chart_from_angle(&st, 1.0).unwrap();
        assert!((slope + 1.0).abs() < 1e-14);
        assert!((second + 2.0 * SQRT_2).abs() < 1e-13);

        let near = CurveState::from_theta(0.0, 0.5, 1.0, PI - 1e-8);
        let (slope, _) = chart_derivatives(&near, &p(2, 0.0)).unwrap();
        assert!((slope / -1e8 - 1.0).abs() < 1e-6, "{slope}");

        let vertical = CurveState::from_theta(0.0, 0.5, 1.0, PI);
        assert!(matches!(chart_derivatives(&vertical, &p(2, 0.0)), Err(OdeError::VerticalTangent { .. })));
    }

    #[test]
    fn series_launch_values() {
        let mut q = p(2, 0.0);
        q.axis_eps = 1e-6;
        let st = axis_series_start(1.0, &q);
        assert!((st.theta() - (FRAC_PI_2 + 0.5e-6)).abs() < 1e-15);
        assert!((st.x - (1.0 - 0.25e-12)).abs() < 1e-16);
        assert_eq!(st.z, 1e-6);
        assert!((axis_curvature(SQRT_2, &q) - SQRT_2 / 2.0).abs() < 1e-15);
        assert!((axis_curvature(0.1, &p(3, -0.01)) - 0.03).abs() < 1e-15);
    }

    #[test]
    fn series_balances_singular_term() {
        // near the axis the equation residual of the launch is O(s^2)
        let q = p(3, -0.2);
        for b in [0.05, 0.7, 2.0] {
            let s = 1e-4;
            let st = series_state(b, s, &q);
            let r = equation_residual(&st, axis_curvature(b, &q), &q).unwrap();
            assert!(r.abs() < 1e-6, "b={b} r={r}");
        }
    }

    #[test]
    fn tiny_turn_is_resolved() {
        let q = p(2, 0.0);
        let st = series_state(1e-18, 1e-6, &q);
        assert!(st.turn > 0.0);
        assert!(st.cos_theta() < 0.0);
    }
}

use serde::{Deserialize, Serialize};

use super::{CurveState, Params};
use crate::Real;

/// The closed-form solutions of the profile equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExactCurve<T> {
    /// Circle `x^2 + z^2 = a^2` traversed counter-clockwise from `(a, 0)`.
    Sphere { radius: T },
    /// Horizontal line `z = a` traversed towards `-x`, starting at `x = x0`.
    Cylinder { radius: T, x0: T },
    /// The vertical line `x = 0`; a solution only for `lambda = 0`.
    Plane,
    /// A circular arc through `center + radius (cos phi, sin phi)` with
    /// `phi = phase +- s/radius`. Not a solution in general; used to build
    /// synthetic curves.
    Arc { cx: T, cz: T, radius: T, phase: T, clockwise: bool },
}

impl<T: Real> ExactCurve<T> {
    pub fn sphere(p: &Params<T>) -> Self {
        ExactCurve::Sphere { radius: p.sphere_radius() }
    }

    pub fn cylinder(p: &Params<T>, x0: T) -> Self {
        ExactCurve::Cylinder { radius: p.cylinder_radius(), x0 }
    }

    pub fn state(&self, s: T) -> CurveState<T> {
        match *self {
            ExactCurve::Sphere { radius } => {
                let phi = s / radius;
                CurveState::new(s, radius * phi.cos(), radius * phi.sin(), phi)
            }
            ExactCurve::Cylinder { radius, x0 } => CurveState::new(s, x0 - s, radius, T::FRAC_PI_2()),
            ExactCurve::Plane => CurveState::new(s, T::zero(), s, T::zero()),
            ExactCurve::Arc { cx, cz, radius, phase, clockwise } => {
                let phi = if clockwise { phase - s / radius } else { phase + s / radius };
                let turn = if clockwise { phi - T::PI() } else { phi };
                CurveState::new(s, cx + radius * phi.cos(), cz + radius * phi.sin(), turn)
            }
        }
    }

    /// Analytic `dtheta/ds`.
    pub fn curvature(&self) -> T {
        match *self {
            ExactCurve::Sphere { radius } => radius.recip(),
            ExactCurve::Arc { radius, clockwise, .. } => {
                if clockwise {
                    -radius.recip()
                } else {
                    radius.recip()
                }
            }
            _ => T::zero(),
        }
    }

    /// Length of the part in the open upper half plane, where one exists.
    pub fn upper_length(&self) -> Option<T> {
        match *self {
            ExactCurve::Sphere { radius } => Some(T::PI() * radius),
            _ => None,
        }
    }
}

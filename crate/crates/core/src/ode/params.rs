use serde::{Deserialize, Serialize};

use super::OdeError;
use crate::Real;

/// Problem configuration: dimension, the constant `lambda`, and integrator
/// controls.
///
/// The profile curve lives in the half plane `z > 0`; rotating it about the
/// x-axis through `S^{n-1}` gives a hypersurface of `R^{n+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params<T> {
    pub n: u32,
    pub lambda: T,
    pub rel_tol: T,
    pub abs_tol: T,
    /// Arc-length tolerance used when rooting events on the dense output.
    pub event_tol_s: T,
    /// Shots whose height reaches this value are reported as diverged.
    pub z_ceiling: T,
    /// Arc-length budget per traced branch.
    pub s_max: T,
    /// Relative offset from the axis at which the series launch hands over to
    /// the integrator; the actual offset is `axis_eps * max(1, b)`.
    pub axis_eps: T,
    pub h_max: T,
    pub max_steps: usize,
}

impl<T: Real> Params<T> {
    /// Builds parameters with default controls for dimension `n` and `lambda`.
    ///
    /// Defaults are `rel_tol = 1e-10`, `abs_tol = 1e-12`, `event_tol_s = 1e-12`,
    /// `axis_eps = 1e-6`, each raised to a few ulps of `T` when the type
    /// cannot represent them meaningfully.
    pub fn new(n: u32, lambda: T) -> Result<Self, OdeError> {
        let eps = T::epsilon();
        let mut p = Params {
            n,
            lambda,
            rel_tol: T::of(1e-10).max(eps * T::of(100.0)),
            abs_tol: T::of(1e-12).max(eps * T::of(10.0)),
            event_tol_s: T::of(1e-12).max(eps * T::of(100.0)),
            z_ceiling: T::zero(),
            s_max: T::zero(),
            axis_eps: T::of(1e-6).max(eps.sqrt()),
            h_max: T::of(0.1),
            max_steps: 2_000_000,
        };
        p.check_shape()?;
        let r = p.sphere_radius();
        p.z_ceiling = T::of(4.0) * r + T::of(10.0);
        p.s_max = T::of(100.0) * r;
        p.validate()?;
        Ok(p)
    }

    pub fn with_tolerances(mut self, rel_tol: T, abs_tol: T) -> Result<Self, OdeError> {
        self.rel_tol = rel_tol;
        self.abs_tol = abs_tol;
        self.validate()?;
        Ok(self)
    }

    fn check_shape(&self) -> Result<(), OdeError> {
        if self.n < 2 {
            return Err(OdeError::InvalidParams(format!("dimension n = {} must be at least 2", self.n)));
        }
        if !self.lambda.is_finite() || self.lambda > T::zero() {
            return Err(OdeError::InvalidParams(format!(
                "lambda = {} must be finite and <= 0",
                self.lambda
            )));
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), OdeError> {
        self.check_shape()?;
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("event_tol_s", self.event_tol_s),
            ("z_ceiling", self.z_ceiling),
            ("s_max", self.s_max),
            ("axis_eps", self.axis_eps),
            ("h_max", self.h_max),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(OdeError::InvalidParams(format!("{name} = {v} must be finite and > 0")));
            }
        }
        if self.axis_eps > T::of(1e-2) {
            return Err(OdeError::InvalidParams(format!(
                "axis_eps = {} is too large for the series launch",
                self.axis_eps
            )));
        }
        if self.max_steps == 0 {
            return Err(OdeError::InvalidParams("max_steps must be positive".into()));
        }
        Ok(())
    }

    /// `n` as a scalar.
    #[inline]
    pub fn dim(&self) -> T {
        T::from_u32(self.n).expect("small integer")
    }

    /// Radius of the round sphere solution, `(-lambda + sqrt(lambda^2 + 4n)) / 2`.
    pub fn sphere_radius(&self) -> T {
        radius(self.lambda, T::of(4.0) * self.dim())
    }

    /// Radius of the cylinder solution, `(-lambda + sqrt(lambda^2 + 4(n-1))) / 2`.
    pub fn cylinder_radius(&self) -> T {
        radius(self.lambda, T::of(4.0) * (self.dim() - T::one()))
    }

    /// The companion root `(lambda + sqrt(lambda^2 + 4(n-1))) / 2`, which bounds
    /// the height of the second vertical tangent from above.
    pub fn shifted_cylinder_radius(&self) -> T {
        radius(-self.lambda, T::of(4.0) * (self.dim() - T::one()))
    }

    /// Arc length at which a shot from height `b` leaves the series launch.
    pub fn launch_offset(&self, b: T) -> T {
        self.axis_eps * b.abs().max(T::one())
    }

    /// `b > -(4n+1) lambda`, the initial-height regime the comparison
    /// estimates are stated for.
    pub fn in_launch_regime(&self, b: T) -> bool {
        b > -(T::of(4.0) * self.dim() + T::one()) * self.lambda
    }
}

fn radius<T: Real>(neg_lambda_coeff: T, four_k: T) -> T {
    (-neg_lambda_coeff + (neg_lambda_coeff * neg_lambda_coeff + four_k).sqrt()) / T::two()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radii_for_self_shrinker() {
        let p = Params::new(2, 0.0).unwrap();
        assert!((p.sphere_radius() - 2f64.sqrt()).abs() < 1e-15);
        assert!((p.cylinder_radius() - 1.0).abs() < 1e-15);
        assert!((p.shifted_cylinder_radius() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn radii_ordering_with_negative_lambda() {
        for n in 2..8 {
            for lambda in [0.0, -0.05, -0.5, -3.0] {
                let p = Params::new(n, lambda).unwrap();
                assert!(p.sphere_radius() > p.cylinder_radius());
                assert!(p.cylinder_radius() > 0.0);
                assert!(p.shifted_cylinder_radius() <= p.cylinder_radius());
            }
        }
        let p = Params::new(2, -0.05).unwrap();
        let expect = (0.05 + (0.0025f64 + 8.0).sqrt()) / 2.0;
        assert!((p.sphere_radius() - expect).abs() < 1e-15);
        let shifted = (-0.05 + (0.0025f64 + 4.0).sqrt()) / 2.0;
        assert!((p.shifted_cylinder_radius() - shifted).abs() < 1e-15);
    }

    #[test]
    fn defaults_follow_sphere_radius() {
        let p = Params::new(3, -0.05).unwrap();
        let r = p.sphere_radius();
        assert_eq!(p.z_ceiling, 4.0 * r + 10.0);
        assert_eq!(p.s_max, 100.0 * r);
        assert_eq!(p.rel_tol, 1e-10);
        assert_eq!(p.abs_tol, 1e-12);
        assert_eq!(p.launch_offset(0.5), 1e-6);
        assert_eq!(p.launch_offset(3.0), 3e-6);
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(matches!(Params::new(1, 0.0), Err(OdeError::InvalidParams(_))));
        assert!(matches!(Params::new(2, 0.1), Err(OdeError::InvalidParams(_))));
        assert!(matches!(Params::new(2, f64::NAN), Err(OdeError::InvalidParams(_))));
        let p = Params::new(2, 0.0).unwrap();
        assert!(p.with_tolerances(0.0, 1e-12).is_err());
        assert!(p.with_tolerances(1e-8, -1.0).is_err());
        let mut q = p;
        q.axis_eps = 0.5;
        assert!(q.validate().is_err());
    }

    #[test]
    fn f32_defaults_are_clamped() {
        let p = Params::<f32>::new(2, 0.0).unwrap();
        assert!(p.rel_tol >= 100.0 * f32::EPSILON);
        assert!(p.axis_eps >= f32::EPSILON.sqrt());
    }

    #[test]
    fn launch_regime() {
        let p = Params::new(2, -0.01).unwrap();
        assert!(!p.in_launch_regime(0.05));
        assert!(p.in_launch_regime(0.1));
        let q = Params::new(2, 0.0).unwrap();
        assert!(q.in_launch_regime(1e-12));
    }
}

use serde::{Deserialize, Serialize};

use super::{interior_samples, CheckParams, CheckResult};
use crate::ode::{equation_residual, integrate, BranchKind, DenseBranch, EventSpec, ExactCurve, Params};
use crate::shooting::{shoot, Terminal};
use crate::Real;

/// Largest pointwise residual of an exact curve over `samples` points of
/// `[0, length]`, with the analytic `theta'`.
pub fn exact_residual<T: Real>(curve: ExactCurve<T>, length: T, p: &Params<T>, samples: usize) -> T {
    let branch = DenseBranch::analytic(curve, T::zero(), length);
    interior_samples(&branch, samples)
        .iter()
        .filter_map(|st| equation_residual(st, curve.curvature(), p).ok())
        .fold(T::zero(), |m, r| m.max(r.abs()))
}

/// Radial error of a shot launched at the sphere radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleReintegration {
    /// Largest `|sqrt(x^2 + z^2) - a|` from the launch to the top.
    pub ascent: f64,
    /// The same from the top back down to the axis.
    pub descent: Option<f64>,
    pub x_at_axis: Option<f64>,
}

impl CircleReintegration {
    pub fn max_deviation(&self) -> f64 {
        self.ascent.max(self.descent.unwrap_or(0.0))
    }
}

/// Integrates from `(a, 0)` with `a` the sphere radius and measures the
/// distance from the circle on both branches.
pub fn sphere_reintegration<T: Real>(p: &Params<T>, samples: usize) -> Result<CircleReintegration, crate::ShootError> {
    let a = p.sphere_radius();
    let shot = shoot(a, p)?;
    let dev = |br: &DenseBranch<T>| br.sample(samples).iter().map(|st| (st.x.hypot(st.z) - a).abs().f64()).fold(0.0, f64::max);
    let x_at_axis = match shot.terminal {
        Terminal::AxisHit { x_at_axis } => Some(x_at_axis.f64()),
        _ => None,
    };
    Ok(CircleReintegration { ascent: dev(&shot.first), descent: shot.second.as_ref().map(dev), x_at_axis })
}

/// Largest `|z - r| + |theta - theta_0|` over length 10 from the cylinder's
/// initial data.
pub fn cylinder_reintegration<T: Real>(p: &Params<T>, samples: usize) -> Result<f64, crate::OdeError> {
    let curve = ExactCurve::cylinder(p, T::zero());
    let start = curve.state(T::zero());
    let tr = integrate(start, p, &EventSpec::until_s(p, T::of(10.0)), BranchKind::Second)?;
    let r = p.cylinder_radius();
    Ok(tr.branch.sample(samples).iter().map(|st| ((st.z - r).abs() + (st.turn - start.turn).abs()).f64()).fold(0.0, f64::max))
}

/// Residuals of the sphere, the cylinder and (for `lambda = 0`) the plane
/// against `tol`, and the integrated circle against `reintegration_tol`.
pub fn check_special_solutions<T: Real>(p: &Params<T>, samples: usize, tol: f64, reintegration_tol: f64) -> Vec<CheckResult> {
    let a = p.sphere_radius();
    let cp = |b: T| CheckParams { n: p.n, lambda: p.lambda.f64(), b: b.f64() };
    let mut out = Vec::new();

    let sphere = ExactCurve::sphere(p);
    let r = exact_residual(sphere, T::PI() * a, p, samples).f64();
    out.push(CheckResult::judged(
        "special_sphere_residual",
        cp(a),
        tol - r,
        format!("max residual {r:e} over {samples} points"),
        "the circle of radius (-lambda + sqrt(lambda^2 + 4n))/2 solves the profile equation",
    ));

    let cyl_r = p.cylinder_radius();
    let r = exact_residual(ExactCurve::cylinder(p, T::zero()), T::of(10.0), p, samples).f64();
    out.push(CheckResult::judged(
        "special_cylinder_residual",
        cp(cyl_r),
        tol - r,
        format!("max residual {r:e} over {samples} points, length 10"),
        "the line z = (-lambda + sqrt(lambda^2 + 4(n-1)))/2 solves the profile equation",
    ));

    let plane_statement = "the line x = 0 solves the profile equation when lambda = 0";
    if p.lambda == T::zero() {
        let r = exact_residual(ExactCurve::Plane, T::of(10.0), p, samples).f64();
        out.push(CheckResult::judged(
            "special_plane_residual",
            cp(T::zero()),
            tol - r,
            format!("max residual {r:e} over {samples} points, length 10"),
            plane_statement,
        ));
    } else {
        out.push(CheckResult::skipped(
            "special_plane_residual",
            cp(T::zero()),
            format!("lambda = {} is not zero", p.lambda),
            plane_statement,
        ));
    }

    let statement = "integrating from (a, 0) stays on the circle of radius a and, for n = 2, lands at (-a, 0)";
    match sphere_reintegration(p, samples) {
        Ok(c) if p.n == 2 => {
            let (descent, landing) = match (c.descent, c.x_at_axis) {
                (Some(d), Some(x)) => (d, (x + a.f64()).abs()),
                _ => (f64::INFINITY, f64::INFINITY),
            };
            out.push(CheckResult::judged(
                "special_sphere_reintegration",
                cp(a),
                (reintegration_tol - c.ascent.max(descent)).min(1e-6 - landing),
                format!("max radial deviation {:e}, axis hit at {:?}", c.ascent.max(descent), c.x_at_axis),
                statement,
            ))
        }
        Ok(c) => out.push(CheckResult::judged(
            "special_sphere_reintegration",
            cp(a),
            reintegration_tol - c.ascent,
            format!(
                "max radial deviation {:e} up to the top; descent into the axis not judged for n = {} (deviation {:?})",
                c.ascent, p.n, c.descent
            ),
            statement,
        )),
        Err(e) => out.push(CheckResult::failed("special_sphere_reintegration", cp(a), e.to_string(), statement)),
    }

    let statement = "integrating the cylinder's initial data stays on the cylinder over length 10";
    match cylinder_reintegration(p, samples) {
        Ok(d) => out.push(CheckResult::judged(
            "special_cylinder_reintegration",
            cp(cyl_r),
            reintegration_tol - d,
            format!("max deviation {d:e}"),
            statement,
        )),
        Err(e) => out.push(CheckResult::failed("special_cylinder_reintegration", cp(cyl_r), e.to_string(), statement)),
    }
    out
}

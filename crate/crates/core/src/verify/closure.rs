use super::intersections::{count_self_intersections, IntersectionReport};
use super::{CheckParams, CheckResult, VerifyError, SLACK};
use crate::ode::Params;
use crate::shooting::{ClosedProfile, ProfileSource};
use crate::Real;

/// Smallest angle between tangents at a crossing that counts as
/// transversal.
pub const MIN_CROSSING_ANGLE: f64 = 1e-3;

fn params_of<T: Real>(profile: &ClosedProfile<T>) -> CheckParams {
    CheckParams { n: profile.params.n, lambda: profile.params.lambda.f64(), b: profile.b0.f64() }
}

/// The closing height and the junction on the z-axis.
pub fn check_b0<T: Real>(profile: &ClosedProfile<T>, p: &Params<T>, tol_f: T) -> Vec<CheckResult> {
    let cp = params_of(profile);
    let a = p.sphere_radius().f64();
    let b0 = profile.b0.f64();
    let tol = tol_f.f64();
    let mut out = vec![CheckResult::judged(
        "b0_below_sphere_radius",
        cp,
        a - b0 + SLACK,
        format!("b0 = {b0}, sphere radius {a}"),
        "b0 < sqrt(2n)",
    )];

    let turn = profile.junction.turn.f64();
    let target = match profile.source {
        ProfileSource::Shot => 1.5 * std::f64::consts::PI,
        ProfileSource::Sphere => std::f64::consts::FRAC_PI_2,
    };
    let x_raw = profile.x_junction_raw.f64();
    out.push(CheckResult::judged(
        "junction_perpendicular",
        cp,
        (tol - x_raw.abs()).min(tol - (turn - target).abs()),
        format!("x at junction {x_raw:e}, theta = {} (target {})", profile.theta_junction(), target + std::f64::consts::FRAC_PI_2),
        "the closing tangent is vertical on the z-axis: |x(s2)| <= tol_f and theta(s2) = 2 pi",
    ));

    let statement = "0 < z(s2) < (lambda + sqrt(lambda^2 + 4(n-1)))/2";
    match profile.source {
        ProfileSource::Shot => {
            let z2 = profile.junction.z.f64();
            let shifted = p.shifted_cylinder_radius().f64();
            out.push(CheckResult::judged(
                "junction_height_window",
                cp,
                z2.min(shifted - z2) + SLACK,
                format!("z(s2) = {z2} in (0, {shifted})"),
                statement,
            ));
        }
        ProfileSource::Sphere => out.push(CheckResult::skipped(
            "junction_height_window",
            cp,
            "the sphere closes at the top of the circle".into(),
            statement,
        )),
    }
    out
}

/// Off-axis self-crossings of the closed profile: two for a traced profile,
/// none for the sphere. Also checks that every crossing is transversal.
pub fn check_self_intersections<T: Real>(
    profile: &ClosedProfile<T>,
    h: T,
) -> Result<(Vec<CheckResult>, IntersectionReport), VerifyError> {
    let cp = params_of(profile);
    let rep = count_self_intersections(profile, h)?;
    let expected: i64 = match profile.source {
        ProfileSource::Shot => 2,
        ProfileSource::Sphere => 0,
    };
    let count = rep.count as i64;
    let mut out = vec![CheckResult::judged(
        "self_intersection_count",
        cp,
        0.5 - (count - expected).abs() as f64,
        format!("{count} off-axis crossings, {} on the axis, resolution {}", rep.axis_points.len(), rep.resolution),
        "the profile crosses itself exactly at a mirror pair of points off the axis",
    )];
    let min_angle = rep.points.iter().chain(&rep.axis_points).map(|c| c.angle).fold(f64::INFINITY, f64::min);
    let statement = "every self-crossing is transversal";
    if min_angle.is_finite() {
        out.push(CheckResult::judged(
            "self_intersection_transversal",
            cp,
            min_angle - MIN_CROSSING_ANGLE,
            format!("smallest crossing angle {min_angle:e}"),
            statement,
        ));
    } else {
        out.push(CheckResult::skipped("self_intersection_transversal", cp, "no crossings".into(), statement));
    }
    Ok((out, rep))
}

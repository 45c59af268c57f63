use serde::{Deserialize, Serialize};

use super::VerifyError;
use crate::geometry::resample_arclength;
use crate::shooting::ClosedProfile;
use crate::Real;

/// A transversal self-crossing of a parametrised plane curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub x: f64,
    pub z: f64,
    /// Curve parameters of the two passes, `u1 < u2`.
    pub u1: f64,
    pub u2: f64,
    /// Angle between the two tangents, in `[0, pi/2]`.
    pub angle: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionReport {
    /// Crossings off the z-axis.
    pub count: usize,
    pub points: Vec<Crossing>,
    /// Crossings of the curve with its own mirror image on the z-axis.
    pub axis_points: Vec<Crossing>,
    /// Arc-length spacing of the polyline that was tested.
    pub resolution: f64,
}

const COLLINEAR_TOL: f64 = 1e-12;
const NEWTON_STEPS: usize = 8;

fn cross(a: (f64, f64), b: (f64, f64)) -> f64 {
    a.0 * b.1 - a.1 * b.0
}

fn sub(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    (a.0 - b.0, a.1 - b.1)
}

/// Intersection parameters `(t, u)` of segments `p + t r` and `q + u s`
/// with both in `[0, 1)`.
fn segment_hit(p: (f64, f64), r: (f64, f64), q: (f64, f64), s: (f64, f64)) -> Result<Option<(f64, f64)>, VerifyError> {
    let denom = cross(r, s);
    let qp = sub(q, p);
    let scale = (r.0.hypot(r.1) * s.0.hypot(s.1)).max(f64::MIN_POSITIVE);
    if denom.abs() <= COLLINEAR_TOL * scale {
        if cross(qp, r).abs() <= COLLINEAR_TOL * scale.sqrt() * r.0.hypot(r.1).max(1.0) {
            let rr = r.0 * r.0 + r.1 * r.1;
            if rr > 0.0 {
                let t0 = (qp.0 * r.0 + qp.1 * r.1) / rr;
                let t1 = t0 + (s.0 * r.0 + s.1 * r.1) / rr;
                let (lo, hi) = (t0.min(t1), t0.max(t1));
                if hi > 0.0 && lo < 1.0 {
                    let t = lo.max(0.0);
                    return Err(VerifyError::DegenerateCrossing { x: p.0 + t * r.0, z: p.1 + t * r.1 });
                }
            }
        }
        return Ok(None);
    }
    let t = cross(qp, s) / denom;
    let u = cross(qp, r) / denom;
    Ok(((0.0..1.0).contains(&t) && (0.0..1.0).contains(&u)).then_some((t, u)))
}

fn tangent(eval: &impl Fn(f64) -> (f64, f64), u: f64, d: f64) -> (f64, f64) {
    let (a, b) = (eval(u + d), eval(u - d));
    ((a.0 - b.0) / (2.0 * d), (a.1 - b.1) / (2.0 * d))
}

/// Newton iteration on `eval(u1) = eval(u2)` with a difference Jacobian.
fn refine(eval: &impl Fn(f64) -> (f64, f64), mut u1: f64, mut u2: f64, d: f64) -> (f64, f64) {
    for _ in 0..NEWTON_STEPS {
        let f = sub(eval(u1), eval(u2));
        let (t1, t2) = (tangent(eval, u1, d), tangent(eval, u2, d));
        // J = [t1, -t2]
        let det = -cross(t1, t2);
        if det.abs() < 1e-300 {
            break;
        }
        let du1 = (f.0 * (-t2.1) - f.1 * (-t2.0)) / det;
        let du2 = (t1.0 * f.1 - t1.1 * f.0) / det;
        u1 -= du1;
        u2 -= du2;
        if du1.abs().max(du2.abs()) < 1e-15 * u1.abs().max(u2.abs()).max(1.0) {
            break;
        }
    }
    (u1, u2)
}

/// Self-crossings of the polyline through `eval` at the increasing
/// parameters `params`, refined on the curve itself.
///
/// Segments are half-open, adjacent segments are never compared, and
/// crossings closer than the smallest parameter spacing are merged.
/// Collinear overlapping segments are an error.
pub fn find_crossings(params: &[f64], eval: impl Fn(f64) -> (f64, f64)) -> Result<Vec<Crossing>, VerifyError> {
    let pts: Vec<(f64, f64)> = params.iter().map(|&u| eval(u)).collect();
    let segs = pts.len().saturating_sub(1);
    let spacing = params.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    if segs < 3 || !spacing.is_finite() {
        return Ok(Vec::new());
    }
    let boxes: Vec<[f64; 4]> = (0..segs)
        .map(|i| {
            let (a, b) = (pts[i], pts[i + 1]);
            [a.0.min(b.0), a.0.max(b.0), a.1.min(b.1), a.1.max(b.1)]
        })
        .collect();
    let d = 1e-3 * spacing;
    let mut found: Vec<Crossing> = Vec::new();
    for i in 0..segs {
        for j in i + 2..segs {
            let (bi, bj) = (boxes[i], boxes[j]);
            if bi[1] < bj[0] || bj[1] < bi[0] || bi[3] < bj[2] || bj[3] < bi[2] {
                continue;
            }
            let (p, q) = (pts[i], pts[j]);
            let Some((t, u)) = segment_hit(p, sub(pts[i + 1], p), q, sub(pts[j + 1], q))? else {
                continue;
            };
            let g1 = params[i] + t * (params[i + 1] - params[i]);
            let g2 = params[j] + u * (params[j + 1] - params[j]);
            let (mut u1, mut u2) = refine(&eval, g1, g2, d);
            if (u1 - g1).abs() > 2.0 * spacing || (u2 - g2).abs() > 2.0 * spacing {
                (u1, u2) = (g1, g2);
            }
            let (x, z) = eval(u1);
            let (t1, t2) = (tangent(&eval, u1, d), tangent(&eval, u2, d));
            let dot = t1.0 * t2.0 + t1.1 * t2.1;
            let angle = cross(t1, t2).abs().atan2(dot.abs());
            let dup = found.iter().any(|c| (c.u1 - u1).abs() < spacing && (c.u2 - u2).abs() < spacing);
            if !dup {
                found.push(Crossing { x, z, u1: u1.min(u2), u2: u1.max(u2), angle });
            }
        }
    }
    Ok(found)
}

/// Self-crossings of a closed profile resampled at spacing `h`, split into
/// off-axis crossings and the passes through the z-axis where the traced
/// half meets its mirror image.
pub fn count_self_intersections<T: Real>(profile: &ClosedProfile<T>, h: T) -> Result<IntersectionReport, VerifyError> {
    let samples = resample_arclength(profile, h);
    let params: Vec<f64> = samples.iter().map(|st| st.s.f64()).collect();
    let total = profile.total_length().f64();
    let eval = |u: f64| {
        let st = profile.eval(T::of(u));
        (st.x.f64(), st.z.f64())
    };
    let hf = h.f64();
    let (axis_points, points): (Vec<Crossing>, Vec<Crossing>) = find_crossings(&params, eval)?
        .into_iter()
        .partition(|c| c.x.abs() <= 1e-9 && (c.u1 + c.u2 - total).abs() <= 10.0 * hf);
    Ok(IntersectionReport { count: points.len(), points, axis_points, resolution: hf })
}

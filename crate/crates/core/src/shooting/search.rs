use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{shoot, ShootError, ShotClass, ShotReport};
use crate::ode::Params;
use crate::Real;

/// Adjacent initial heights with a `Positive` shot at `lo` and a
/// non-positive one at `hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket<T> {
    pub lo: T,
    pub hi: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanSample {
    pub b: f64,
    pub class: ShotClass,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult<T> {
    /// The lowest class change, used for bisection.
    pub bracket: Bracket<T>,
    /// Every Positive to non-Positive change on the grid, in increasing `b`.
    pub flips: Vec<Bracket<T>>,
    pub samples: Vec<ScanSample>,
}

/// `max(1e-3, -2 lambda)`: the lowest height whose launch curvature
/// `(b + lambda)/n` is at least `-lambda/n`. Lower heights bend back
/// towards the axis plane or follow the plane `x = -lambda`.
pub fn default_b_min<T: Real>(p: &Params<T>) -> T {
    T::of(1e-3).max(-T::two() * p.lambda)
}

/// Shoots on a geometric grid of `grid` heights over `[b_min, b_max]` and
/// returns the class changes. Shots run in parallel on the current rayon pool.
///
/// A shot that errors is recorded as `Anomalous`.
pub fn bracket_scan<T: Real>(p: &Params<T>, b_min: T, b_max: T, grid: usize) -> Result<ScanResult<T>, ShootError> {
    if grid < 2 || !(b_min > T::zero()) || !(b_max > b_min) {
        return Err(ShootError::InvalidBracket { lo: b_min.f64(), hi: b_max.f64() });
    }
    let ratio = (b_max / b_min).ln() / T::from_usize(grid - 1).expect("grid");
    let bs: Vec<T> = (0..grid)
        .map(|i| if i + 1 == grid { b_max } else { b_min * (ratio * T::from_usize(i).expect("index")).exp() })
        .collect();
    let shots: Vec<(ShotClass, Option<T>)> = bs
        .par_iter()
        .map(|&b| match shoot(b, p) {
            Ok(r) => (r.class(), r.residual()),
            Err(_) => (ShotClass::Anomalous, None),
        })
        .collect();
    let samples: Vec<ScanSample> = bs
        .iter()
        .zip(&shots)
        .map(|(b, (class, res))| ScanSample { b: b.f64(), class: *class, residual: res.map(Real::f64) })
        .collect();
    let flips: Vec<Bracket<T>> = (0..grid - 1)
        .filter(|&i| shots[i].0.is_positive() && !shots[i + 1].0.is_positive())
        .map(|i| Bracket { lo: bs[i], hi: bs[i + 1] })
        .collect();
    match flips.first() {
        Some(&bracket) => Ok(ScanResult { bracket, flips, samples }),
        None => {
            let positive = samples.iter().filter(|s| s.class.is_positive()).count();
            Err(ShootError::NoBracket { samples, positive })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bisection<T> {
    pub b0: T,
    pub report: ShotReport<T>,
    /// Every shot taken, in order.
    pub history: Vec<ScanSample>,
    pub final_bracket: Bracket<T>,
}

/// Bisects on the shot class until the bracket is narrower than `tol_b` or
/// a second vertical tangent lands within `tol_f` of the z-axis.
///
/// A degenerate bracket `lo == hi` returns the shot at that height as is.
pub fn bisect_b0<T: Real>(br: Bracket<T>, p: &Params<T>, tol_b: T, tol_f: T) -> Result<Bisection<T>, ShootError> {
    if !(br.lo <= br.hi) || !(br.lo > T::zero()) {
        return Err(ShootError::InvalidBracket { lo: br.lo.f64(), hi: br.hi.f64() });
    }
    let sample = |r: &ShotReport<T>| ScanSample { b: r.b.f64(), class: r.class(), residual: r.residual().map(Real::f64) };
    if br.lo == br.hi {
        let report = shoot(br.lo, p)?;
        return Ok(Bisection { b0: br.lo, history: vec![sample(&report)], report, final_bracket: br });
    }
    let (mut lo, mut hi) = (br.lo, br.hi);
    let mut history = Vec::new();
    let mut best: Option<ShotReport<T>> = None;
    let converged = |r: &ShotReport<T>| r.residual().is_some_and(|f| f.abs() <= tol_f);
    while hi - lo > tol_b {
        let mid = lo + (hi - lo) * T::half();
        if !(mid > lo && mid < hi) {
            break;
        }
        let r = shoot(mid, p).map_err(|e| ShootError::ClassFlipAnomaly { b: mid.f64(), reason: e.to_string() })?;
        history.push(sample(&r));
        match r.class() {
            ShotClass::Anomalous => {
                return Err(ShootError::ClassFlipAnomaly {
                    b: mid.f64(),
                    reason: r.anomaly().unwrap_or_default().to_string(),
                })
            }
            ShotClass::Positive => lo = mid,
            _ => hi = mid,
        }
        let done = converged(&r);
        let closer = match (r.residual(), best.as_ref().and_then(ShotReport::residual)) {
            (Some(f), Some(g)) => f.abs() <= g.abs(),
            (Some(_), None) => true,
            _ => false,
        };
        if closer {
            best = Some(r);
        }
        if done {
            break;
        }
    }
    let report = match best {
        Some(r) => r,
        None => shoot(lo, p)?,
    };
    match report.residual() {
        Some(f) if f.abs() <= tol_f => {
            Ok(Bisection { b0: report.b, report, history, final_bracket: Bracket { lo, hi } })
        }
        other => Err(ShootError::NotConverged { b: report.b.f64(), residual: other.map_or(f64::NAN, Real::f64) }),
    }
}

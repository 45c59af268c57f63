//! Numerical checks of the shape estimates along traced shots, of the
//! closed profile, and of the equation itself.
//!
//! Every check produces a [`CheckResult`] with a signed margin: positive
//! exactly when the check passed, with the declared slack already added.
//! Checks whose hypotheses do not hold, or whose thresholds cannot be
//! represented as an integration regime, are recorded as
//! [`CheckStatus::Skipped`] and never count as passed.

mod closure;
mod gates;
mod intersections;
mod shot;
mod special;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{chart_from_angle, rhs, CurveState, DenseBranch, OdeError, Params};
use crate::Real;

pub use closure::{check_b0, check_self_intersections, MIN_CROSSING_ANGLE};
pub use gates::{ln_bbar_threshold, ln_small_b_threshold, Gate, PRACTICAL_B_FLOOR};
pub use intersections::{count_self_intersections, find_crossings, Crossing, IntersectionReport};
pub use shot::{check_first_branch, check_s1_estimates, check_second_branch, check_small_b, verify_shot};
pub use special::{check_special_solutions, cylinder_reintegration, exact_residual, sphere_reintegration, CircleReintegration};

/// Absolute slack granted to every strict inequality.
pub const SLACK: f64 = 1e-6;
/// Slack for the strict decrease of sampled chart curvature.
pub const MONOTONE_SLACK: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("no z-axis crossing on the first branch at b = {b}")]
    MissingZ0 { b: f64 },
    #[error("collinear overlapping segments at ({x}, {z})")]
    DegenerateCrossing { x: f64, z: f64 },
    #[error(transparent)]
    Ode(#[from] OdeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub n: u32,
    pub lambda: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: String,
    pub params: CheckParams,
    pub status: CheckStatus,
    /// Signed distance to the inequality boundary including slack; absent
    /// for skipped checks and for failures where no distance is defined.
    pub margin: Option<f64>,
    pub details: String,
    /// The inequality the check tests.
    pub statement: String,
}

impl CheckResult {
    pub(crate) fn judged(id: &str, params: CheckParams, margin: f64, details: String, statement: &str) -> Self {
        let status = if margin > 0.0 { CheckStatus::Pass } else { CheckStatus::Fail };
        CheckResult {
            check_id: id.to_string(),
            params,
            status,
            margin: Some(margin),
            details,
            statement: statement.to_string(),
        }
    }

    pub(crate) fn failed(id: &str, params: CheckParams, details: String, statement: &str) -> Self {
        CheckResult {
            check_id: id.into(),
            params,
            status: CheckStatus::Fail,
            margin: None,
            details,
            statement: statement.into(),
        }
    }

    pub(crate) fn skipped(id: &str, params: CheckParams, details: String, statement: &str) -> Self {
        CheckResult {
            check_id: id.into(),
            params,
            status: CheckStatus::Skipped,
            margin: None,
            details,
            statement: statement.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn failed_check(&self) -> bool {
        self.status == CheckStatus::Fail
    }
}

/// A collection of check results, kept sorted by `(check_id, b)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub records: Vec<CheckResult>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl VerificationReport {
    pub fn new(mut records: Vec<CheckResult>) -> Self {
        sort_records(&mut records);
        VerificationReport { records }
    }

    pub fn extend(&mut self, more: impl IntoIterator<Item = CheckResult>) {
        self.records.extend(more);
        sort_records(&mut self.records);
    }

    pub fn tally(&self) -> Tally {
        let mut t = Tally::default();
        for r in &self.records {
            match r.status {
                CheckStatus::Pass => t.passed += 1,
                CheckStatus::Fail => t.failed += 1,
                CheckStatus::Skipped => t.skipped += 1,
            }
        }
        t
    }

    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.status != CheckStatus::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.records.iter().filter(|r| r.failed_check())
    }
}

fn sort_records(records: &mut [CheckResult]) {
    records.sort_by(|a, b| {
        a.check_id.cmp(&b.check_id).then(a.params.b.total_cmp(&b.params.b)).then(a.params.lambda.total_cmp(&b.params.lambda))
    });
}

/// `theta'` along a branch: the closed form for analytic branches, the
/// equation itself otherwise.
pub(crate) fn curvature_at<T: Real>(branch: &DenseBranch<T>, st: &CurveState<T>, p: &Params<T>) -> Result<T, OdeError> {
    match branch.exact_curve() {
        Some(c) => Ok(c.curvature()),
        None => Ok(rhs(st, p)?.dtheta_ds),
    }
}

/// Chart derivatives `(g', g'')` of the local graph `x = g(z)`, or `None`
/// at a vertical tangent.
pub(crate) fn chart_at<T: Real>(branch: &DenseBranch<T>, st: &CurveState<T>, p: &Params<T>) -> Option<(T, T)> {
    let k = curvature_at(branch, st, p).ok()?;
    chart_from_angle(st, k).ok()
}

/// `count` states strictly inside the branch, uniform in arc length.
pub(crate) fn interior_samples<T: Real>(branch: &DenseBranch<T>, count: usize) -> Vec<CurveState<T>> {
    let len = branch.length();
    let nf = T::from_usize(count).expect("count");
    (0..count)
        .map(|i| branch.eval(branch.s_start() + len * (T::from_usize(i).expect("index") + T::half()) / nf))
        .collect()
}

/// Largest equation residual over `samples` interior points of a branch,
/// with `theta'` taken from central differences of the dense output.
/// Points at or below the axis floor are skipped.
pub fn residual_along<T: Real>(branch: &DenseBranch<T>, p: &Params<T>, samples: usize) -> T {
    residual_along_with_step(branch, p, samples, T::of(1e-5))
}

/// [`residual_along`] with an explicit difference step.
pub fn residual_along_with_step<T: Real>(branch: &DenseBranch<T>, p: &Params<T>, samples: usize, step: T) -> T {
    let (lo, hi) = (branch.s_start(), branch.s_end());
    let mut worst = T::zero();
    for st in interior_samples(branch, samples.max(1)) {
        if st.z <= p.axis_eps {
            continue;
        }
        let h = step.min(st.s - lo).min(hi - st.s);
        if !(h > T::zero()) {
            continue;
        }
        let dtheta = (branch.eval(st.s + h).turn - branch.eval(st.s - h).turn) / (T::two() * h);
        if let Ok(r) = crate::ode::equation_residual(&st, dtheta, p) {
            worst = worst.max(r.abs());
        }
    }
    worst
}

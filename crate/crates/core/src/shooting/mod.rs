//! Shots from the axis, classification, the search for `b0` and the closed
//! profile.

mod closed;
mod search;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::{
    axis_series_start, integrate, BranchKind, DenseBranch, Event, EventKind, EventSpec, OdeError, Params,
    TerminalReason,
};
use crate::Real;

pub use closed::{close_profile, ClosedProfile, ProfileSource};
pub use search::{bisect_b0, bracket_scan, default_b_min, Bisection, Bracket, ScanResult, ScanSample};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ShootError {
    #[error(transparent)]
    Ode(#[from] OdeError),
    #[error("first branch did not reach a vertical tangent: {0}")]
    Diverged(String),
    #[error("no class change on the scan grid ({} samples, {positive} positive)", samples.len())]
    NoBracket { samples: Vec<ScanSample>, positive: usize },
    #[error("invalid bracket [{lo}, {hi}]")]
    InvalidBracket { lo: f64, hi: f64 },
    #[error("anomalous shot at b = {b} during bisection: {reason}")]
    ClassFlipAnomaly { b: f64, reason: String },
    #[error("bisection stopped at b = {b} with residual x(s2) = {residual:e}")]
    NotConverged { b: f64, residual: f64 },
    #[error("junction is off the z-axis: x(s2) = {x_s2:e} exceeds {tol:e}")]
    JunctionMismatch { x_s2: f64, tol: f64 },
    #[error("shot cannot be closed: {0}")]
    NotClosable(String),
}

/// How a shot ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Terminal<T> {
    /// Reached `theta = 2 pi` above the axis.
    SecondVerticalTangent,
    /// Came down to the axis; `x_at_axis` is the tangent-line extrapolation to `z = 0`.
    AxisHit { x_at_axis: T },
    /// Left through the height ceiling or the arc-length budget.
    Diverged { reason: String },
    /// Violated a shape property every shot with `b > -(4n+1) lambda` has.
    Anomalous { reason: String },
    /// The same kind of violation at a height outside that regime, where
    /// the property is not guaranteed.
    Irregular { reason: String },
}

/// Bisection class of a shot. `Positive` shots are the ones reaching the
/// second vertical tangent through a horizontal tangent, to the right of
/// the z-axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ShotClass {
    Positive,
    Negative,
    AxisHit,
    Diverged,
    Anomalous,
    Irregular,
}

impl ShotClass {
    pub fn is_positive(self) -> bool {
        self == ShotClass::Positive
    }
}

/// Everything learned from one shot at initial height `b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotReport<T> {
    pub b: T,
    pub n: u32,
    pub lambda: T,
    /// `b > -(4n+1) lambda`.
    pub in_regime: bool,
    /// First vertical tangent, `theta = pi`.
    pub s1: Option<Event<T>>,
    /// Horizontal tangent on the second branch, `theta = 3pi/2`.
    pub sm: Option<Event<T>>,
    /// Second vertical tangent, `theta = 2pi`.
    pub s2: Option<Event<T>>,
    /// First-branch crossing of the z-axis.
    pub z0: Option<Event<T>>,
    pub terminal: Terminal<T>,
    pub first: DenseBranch<T>,
    pub second: Option<DenseBranch<T>>,
}

impl<T: Real> ShotReport<T> {
    pub fn class(&self) -> ShotClass {
        match &self.terminal {
            Terminal::SecondVerticalTangent => match (&self.sm, &self.s2) {
                (Some(_), Some(s2)) if s2.state.x > T::zero() => ShotClass::Positive,
                _ => ShotClass::Negative,
            },
            Terminal::AxisHit { .. } => ShotClass::AxisHit,
            Terminal::Diverged { .. } => ShotClass::Diverged,
            Terminal::Anomalous { .. } => ShotClass::Anomalous,
            Terminal::Irregular { .. } => ShotClass::Irregular,
        }
    }

    /// Shooting residual `F(b) = x(s2)`, where the second vertical tangent exists.
    pub fn residual(&self) -> Option<T> {
        match self.terminal {
            Terminal::SecondVerticalTangent => self.s2.map(|e| e.state.x),
            _ => None,
        }
    }

    pub fn anomaly(&self) -> Option<&str> {
        match &self.terminal {
            Terminal::Anomalous { reason } => Some(reason),
            _ => None,
        }
    }

    /// Reason for a shape violation outside the regime.
    pub fn irregularity(&self) -> Option<&str> {
        match &self.terminal {
            Terminal::Irregular { reason } => Some(reason),
            _ => None,
        }
    }
}

/// First branch with its terminal vertical tangent.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstBranch<T> {
    pub branch: DenseBranch<T>,
    pub s1: Event<T>,
}

/// Launches from `(b, 0)` and integrates to the first vertical tangent.
///
/// The tangent normally turns counter-clockwise and stops at `theta = pi`;
/// a branch turning back to `theta = 0` still ends here, and [`shoot`]
/// reports it as anomalous.
pub fn trace_first_branch<T: Real>(b: T, p: &Params<T>) -> Result<FirstBranch<T>, ShootError> {
    trace_first_inner(b, p)?.0
}

fn trace_first_inner<T: Real>(
    b: T,
    p: &Params<T>,
) -> Result<(Result<FirstBranch<T>, ShootError>, DenseBranch<T>), ShootError> {
    if !(b > T::zero() && b.is_finite()) {
        return Err(OdeError::InvalidParams(format!("initial height b = {b} must be positive")).into());
    }
    let start = axis_series_start(b, p);
    let tr = integrate(start, p, &EventSpec::until_vertical(p), BranchKind::First)?;
    let out = match (tr.reason, tr.terminal_event()) {
        (TerminalReason::Event(EventKind::VerticalTangent), Some(ev)) => {
            Ok(FirstBranch { branch: tr.branch.clone(), s1: *ev })
        }
        (reason, _) => Err(ShootError::Diverged(format!("{reason:?} at s = {}", tr.branch.end.s))),
    };
    Ok((out, tr.branch))
}

/// Second branch with its events.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondBranch<T> {
    pub branch: DenseBranch<T>,
    pub sm: Option<Event<T>>,
    pub s2: Option<Event<T>>,
    pub terminal: Terminal<T>,
}

/// Continues from the first vertical tangent until `theta = 2 pi`, the axis,
/// or a guard.
pub fn trace_second_branch<T: Real>(s1: &Event<T>, p: &Params<T>) -> Result<SecondBranch<T>, ShootError> {
    if s1.kind != EventKind::VerticalTangent || s1.level != Some(2) {
        return Err(ShootError::NotClosable(format!("second branch must start at theta = pi, got {:?}", s1.level)));
    }
    let mut start = s1.state;
    start.turn = T::FRAC_PI_2();
    let tr = integrate(start, p, &EventSpec::until_vertical(p), BranchKind::Second)?;
    let branch = tr.branch;
    let horizontals: Vec<Event<T>> = branch.events_of(EventKind::HorizontalTangent).copied().collect();
    let sm = horizontals.iter().find(|e| e.level == Some(3)).copied();
    let floor = start.turn - T::of(1e-9);
    let retreat = branch.states().iter().any(|st| st.turn < floor);

    let mut s2 = None;
    let mut terminal = match tr.reason {
        TerminalReason::Event(EventKind::VerticalTangent) => {
            let ev = *branch.events.last().expect("terminal event recorded");
            if ev.level == Some(4) {
                s2 = Some(ev);
                Terminal::SecondVerticalTangent
            } else {
                Terminal::Anomalous { reason: format!("tangent turned back to {} before 2 pi", level_angle(ev.level)) }
            }
        }
        TerminalReason::Event(EventKind::XAxisApproach) => {
            let st = branch.end;
            let x_at_axis = st.x - st.z * st.cos_theta() / st.sin_theta();
            Terminal::AxisHit { x_at_axis }
        }
        reason => Terminal::Diverged { reason: format!("{reason:?} at s = {}", branch.end.s) },
    };
    if retreat {
        terminal = Terminal::Anomalous { reason: "theta fell below pi on the second branch".into() };
    } else if horizontals.len() > 1 {
        terminal = Terminal::Anomalous {
            reason: format!("{} horizontal tangents on the second branch", horizontals.len()),
        };
    }
    Ok(SecondBranch { branch, sm, s2, terminal })
}

/// Runs both branches at initial height `b` and classifies the result.
pub fn shoot<T: Real>(b: T, p: &Params<T>) -> Result<ShotReport<T>, ShootError> {
    let mut report = shoot_inner(b, p)?;
    if !report.in_regime {
        if let Terminal::Anomalous { reason } = &report.terminal {
            report.terminal = Terminal::Irregular { reason: reason.clone() };
        }
    }
    Ok(report)
}

fn shoot_inner<T: Real>(b: T, p: &Params<T>) -> Result<ShotReport<T>, ShootError> {
    let (first, raw) = trace_first_inner(b, p)?;
    let z0 = raw.events_of(EventKind::ZAxisCrossing).next().copied();
    let mut report = ShotReport {
        b,
        n: p.n,
        lambda: p.lambda,
        in_regime: p.in_launch_regime(b),
        s1: None,
        sm: None,
        s2: None,
        z0,
        terminal: Terminal::Diverged { reason: String::new() },
        first: raw,
        second: None,
    };
    let first = match first {
        Ok(f) => f,
        Err(ShootError::Diverged(reason)) => {
            report.terminal = Terminal::Diverged { reason };
            return Ok(report);
        }
        Err(e) => return Err(e),
    };
    report.s1 = Some(first.s1);
    if first.s1.level != Some(2) {
        report.terminal = Terminal::Anomalous {
            reason: format!("first vertical tangent at {}, expected theta = pi", level_angle(first.s1.level)),
        };
        return Ok(report);
    }
    let cyl = p.cylinder_radius();
    if first.s1.state.z <= cyl - T::of(1e-9) {
        report.terminal = Terminal::Anomalous {
            reason: format!("z(s1) = {} is not above the cylinder radius {}", first.s1.state.z, cyl),
        };
        return Ok(report);
    }
    let second = trace_second_branch(&first.s1, p)?;
    report.sm = second.sm;
    report.s2 = second.s2;
    report.terminal = second.terminal;
    report.second = Some(second.branch);
    Ok(report)
}

fn level_angle(level: Option<i32>) -> String {
    match level {
        Some(m) => format!("theta = {m} pi/2"),
        None => "an unlevelled angle".into(),
    }
}

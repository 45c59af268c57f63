use serde::{Deserialize, Serialize};

use super::exact::ExactCurve;
use super::CurveState;
use crate::Real;

/// Which part of a shot a branch describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BranchKind {
    /// From the axis launch to the first vertical tangent, the graph `x = gamma(z)`.
    First,
    /// From the first vertical tangent onwards, the graph `x = beta(z)`.
    Second,
    /// A closed-form special solution.
    Analytic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    /// `dz/ds = 0`, i.e. `theta` a multiple of `pi`.
    VerticalTangent,
    /// `dx/ds = 0`, i.e. `theta` an odd multiple of `pi/2`.
    HorizontalTangent,
    /// The curve descended to the axis floor `z = axis_eps`.
    XAxisApproach,
    /// `x = 0`.
    ZAxisCrossing,
}

/// A localized event on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event<T> {
    pub kind: EventKind,
    pub s: T,
    pub state: CurveState<T>,
    /// For tangent events, the crossed angle as a multiple of `pi/2`
    /// (`2` is the first vertical tangent `theta = pi`, `3` the horizontal
    /// tangent `theta = 3pi/2`, `4` the second vertical tangent).
    pub level: Option<i32>,
}

impl<T: Real> Event<T> {
    /// The crossed tangent angle, for tangent events.
    pub fn theta_level(&self) -> Option<T> {
        self.level.map(|m| T::from_i32(m).expect("small integer") * T::FRAC_PI_2())
    }
}

/// One accepted integrator step with its continuous extension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseStep<T> {
    pub s0: T,
    pub h: T,
    /// Coefficients of the fourth-order interpolant per component `(x, z, turn)`.
    pub(crate) rcont: [[T; 3]; 5],
}

impl<T: Real> DenseStep<T> {
    pub fn start(&self) -> CurveState<T> {
        let r = &self.rcont[0];
        CurveState::new(self.s0, r[0], r[1], r[2])
    }

    pub fn eval(&self, s: T) -> CurveState<T> {
        let t = (s - self.s0) / self.h;
        let t1 = T::one() - t;
        let mut y = [T::zero(); 3];
        for (i, out) in y.iter_mut().enumerate() {
            let r = |k: usize| self.rcont[k][i];
            *out = r(0) + t * (r(1) + t1 * (r(2) + t * (r(3) + t1 * r(4))));
        }
        CurveState::new(s, y[0], y[1], y[2])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) enum Repr<T> {
    Steps(Vec<DenseStep<T>>),
    Exact(ExactCurve<T>),
}

/// A traced arc of the profile: evaluable at any arc length in range, plus
/// the events met along the way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DenseBranch<T> {
    pub kind: BranchKind,
    pub(crate) repr: Repr<T>,
    pub start: CurveState<T>,
    pub end: CurveState<T>,
    pub events: Vec<Event<T>>,
}

impl<T: Real> DenseBranch<T> {
    pub(crate) fn from_steps(kind: BranchKind, steps: Vec<DenseStep<T>>, end: CurveState<T>, events: Vec<Event<T>>) -> Self {
        let start = steps.first().map(|st| st.start()).unwrap_or(end);
        DenseBranch { kind, repr: Repr::Steps(steps), start, end, events }
    }

    /// Closed-form branch over `[s0, s1]`.
    pub fn analytic(curve: ExactCurve<T>, s0: T, s1: T) -> Self {
        DenseBranch {
            kind: BranchKind::Analytic,
            start: curve.state(s0),
            end: curve.state(s1),
            repr: Repr::Exact(curve),
            events: Vec::new(),
        }
    }

    pub fn s_start(&self) -> T {
        self.start.s
    }

    pub fn s_end(&self) -> T {
        self.end.s
    }

    pub fn length(&self) -> T {
        self.end.s - self.start.s
    }

    /// The closed-form curve behind an analytic branch.
    pub fn exact_curve(&self) -> Option<&ExactCurve<T>> {
        match &self.repr {
            Repr::Exact(c) => Some(c),
            Repr::Steps(_) => None,
        }
    }

    /// Number of integrator steps (zero for analytic branches).
    pub fn step_count(&self) -> usize {
        match &self.repr {
            Repr::Steps(v) => v.len(),
            Repr::Exact(_) => 0,
        }
    }

    /// State at arc length `s`, clamped to the branch range.
    pub fn eval(&self, s: T) -> CurveState<T> {
        let s = s.max(self.start.s).min(self.end.s);
        match &self.repr {
            Repr::Exact(c) => c.state(s),
            Repr::Steps(steps) => {
                if s >= self.end.s {
                    return self.end;
                }
                let i = steps.partition_point(|st| st.s0 <= s).saturating_sub(1);
                steps[i].eval(s)
            }
        }
    }

    /// Step nodes in increasing `s`, ending with the terminal state.
    pub fn states(&self) -> Vec<CurveState<T>> {
        match &self.repr {
            Repr::Steps(steps) => {
                let mut v: Vec<_> = steps.iter().map(DenseStep::start).collect();
                if v.last().is_some_and(|last| last.s >= self.end.s) {
                    v.pop();
                }
                v.push(self.end);
                v
            }
            Repr::Exact(_) => vec![self.start, self.end],
        }
    }

    /// `count >= 2` states uniformly spaced in arc length, endpoints included.
    pub fn sample(&self, count: usize) -> Vec<CurveState<T>> {
        let count = count.max(2);
        let len = self.length();
        let denom = T::from_usize(count - 1).expect("count");
        (0..count)
            .map(|i| {
                if i + 1 == count {
                    self.end
                } else {
                    self.eval(self.start.s + len * T::from_usize(i).expect("index") / denom)
                }
            })
            .collect()
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event<T>> {
        self.events.iter().filter(move |e| e.kind == kind)
    }
}

use serde::{Deserialize, Serialize};

use super::branch::{BranchKind, DenseBranch, DenseStep, Event, EventKind};
use super::state::rhs_unchecked;
use super::{CurveState, OdeError, Params};
use crate::Real;

/// Which events end an integration. The descent to the axis floor always
/// ends it, because the equation is singular on the axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventSpec<T> {
    pub stop_vertical: bool,
    pub stop_horizontal: bool,
    pub stop_z_axis: bool,
    /// Height at which a descending curve is treated as having reached the axis.
    pub z_floor: T,
    /// Stop at this arc length if nothing else happens first.
    pub s_end: Option<T>,
}

impl<T: Real> EventSpec<T> {
    /// Record every event, stop only at the axis floor or the budgets.
    pub fn record_only(p: &Params<T>) -> Self {
        EventSpec {
            stop_vertical: false,
            stop_horizontal: false,
            stop_z_axis: false,
            z_floor: p.axis_eps,
            s_end: None,
        }
    }

    pub fn until_vertical(p: &Params<T>) -> Self {
        EventSpec { stop_vertical: true, ..Self::record_only(p) }
    }

    pub fn until_s(p: &Params<T>, s_end: T) -> Self {
        EventSpec { s_end: Some(s_end), ..Self::record_only(p) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TerminalReason {
    Event(EventKind),
    /// The requested `s_end` was reached.
    SEnd,
    /// The height exceeded `z_ceiling`.
    ZCeiling,
    /// The arc-length budget `s_max` ran out.
    ArcBudget,
}

/// Output of [`integrate`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace<T> {
    pub branch: DenseBranch<T>,
    pub reason: TerminalReason,
    pub rejected_steps: usize,
}

impl<T: Real> Trace<T> {
    /// The terminal event, if the integration ended on one.
    pub fn terminal_event(&self) -> Option<&Event<T>> {
        match self.reason {
            TerminalReason::Event(kind) => self.branch.events.iter().rev().find(|e| e.kind == kind),
            _ => None,
        }
    }
}

type V3<T> = [T; 3];

struct Tableau<T> {
    a: [[T; 6]; 7],
    e: [T; 7],
    d: [T; 7],
}

impl<T: Real> Tableau<T> {
    fn new() -> Self {
        let f = |x: f64| T::of(x);
        let z = T::zero();
        Tableau {
            a: [
                [z; 6],
                [f(1.0 / 5.0), z, z, z, z, z],
                [f(3.0 / 40.0), f(9.0 / 40.0), z, z, z, z],
                [f(44.0 / 45.0), f(-56.0 / 15.0), f(32.0 / 9.0), z, z, z],
                [f(19372.0 / 6561.0), f(-25360.0 / 2187.0), f(64448.0 / 6561.0), f(-212.0 / 729.0), z, z],
                [
                    f(9017.0 / 3168.0),
                    f(-355.0 / 33.0),
                    f(46732.0 / 5247.0),
                    f(49.0 / 176.0),
                    f(-5103.0 / 18656.0),
                    z,
                ],
                [f(35.0 / 384.0), z, f(500.0 / 1113.0), f(125.0 / 192.0), f(-2187.0 / 6784.0), f(11.0 / 84.0)],
            ],
            e: [
                f(71.0 / 57600.0),
                z,
                f(-71.0 / 16695.0),
                f(71.0 / 1920.0),
                f(-17253.0 / 339200.0),
                f(22.0 / 525.0),
                f(-1.0 / 40.0),
            ],
            d: [
                f(-12715105075.0 / 11282082432.0),
                z,
                f(87487479700.0 / 32700410799.0),
                f(-10690763975.0 / 1880347072.0),
                f(701980252875.0 / 199316789632.0),
                f(-1453857185.0 / 822651844.0),
                f(69997945.0 / 29380423.0),
            ],
        }
    }
}

struct System<T> {
    lambda: T,
    n1: T,
}

impl<T: Real> System<T> {
    fn eval(&self, y: &V3<T>) -> Option<V3<T>> {
        if !(y[1] > T::zero()) || !y.iter().all(|v| v.is_finite()) {
            return None;
        }
        let d = rhs_unchecked(y[0], y[1], y[2], self.lambda, self.n1);
        Some([d.dx_ds, d.dz_ds, d.dtheta_ds])
    }
}

fn axpy<T: Real>(y: &V3<T>, h: T, coeffs: &[T], ks: &[V3<T>]) -> V3<T> {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        if *c == T::zero() {
            continue;
        }
        for i in 0..3 {
            out[i] = out[i] + h * *c * k[i];
        }
    }
    out
}

/// Integrates the profile system from `start` with an adaptive Dormand-Prince
/// 5(4) scheme, keeping the continuous extension of every accepted step and
/// rooting tangent, axis and z-axis events on it.
///
/// Vertical and horizontal tangents are the crossings of `theta` through the
/// multiples of `pi/2`; a level the start state sits on exactly is not
/// reported.
pub fn integrate<T: Real>(
    start: CurveState<T>,
    p: &Params<T>,
    spec: &EventSpec<T>,
    kind: BranchKind,
) -> Result<Trace<T>, OdeError> {
    p.validate()?;
    let sys = System { lambda: p.lambda, n1: p.dim() - T::one() };
    let tab = Tableau::<T>::new();
    let mut y: V3<T> = [start.x, start.z, start.turn];
    let mut s = start.s;
    let mut k1 = sys.eval(&y).ok_or(OdeError::AxisSingularity { z: start.z.f64() })?;

    let s_budget = start.s + p.s_max;
    let s_stop = spec.s_end.map_or(s_budget, |e| e.min(s_budget));
    let mut h = p.h_max.min(T::of(0.1) * start.z).min(T::of(1e-2));
    let mut steps: Vec<DenseStep<T>> = Vec::new();
    let mut events: Vec<Event<T>> = Vec::new();
    let mut rejected = 0usize;
    let mut attempts = 0usize;
    let safety = T::of(0.9);
    let fac_min = T::of(0.2);
    let fac_max = T::of(5.0);

    if s >= s_stop {
        let reason = if spec.s_end.is_some_and(|e| e <= s_budget) { TerminalReason::SEnd } else { TerminalReason::ArcBudget };
        let end = CurveState::new(s, y[0], y[1], y[2]);
        return Ok(Trace { branch: DenseBranch::from_steps(kind, steps, end, events), reason, rejected_steps: 0 });
    }

    loop {
        attempts += 1;
        if attempts > p.max_steps {
            return Err(OdeError::BudgetExceeded { s: s.f64(), steps: attempts - 1 });
        }
        let h_min = T::of(16.0) * T::epsilon() * s.abs().max(T::one());
        let mut last = false;
        if s + h >= s_stop {
            h = s_stop - s;
            last = true;
        }
        if h < h_min && !last {
            return Err(OdeError::StepSizeUnderflow { s: s.f64(), h: h.f64() });
        }

        let mut ks: [V3<T>; 7] = [k1; 7];
        let mut ok = true;
        for i in 1..7 {
            let yi = axpy(&y, h, &tab.a[i][..i], &ks[..i]);
            match sys.eval(&yi) {
                Some(k) => ks[i] = k,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            rejected += 1;
            h = h * T::half();
            continue;
        }
        let y1 = axpy(&y, h, &tab.a[6], &ks[..6]);

        let mut acc = T::zero();
        for i in 0..3 {
            let mut e = T::zero();
            for j in 0..7 {
                e = e + tab.e[j] * ks[j][i];
            }
            let sc = p.abs_tol + p.rel_tol * y[i].abs().max(y1[i].abs());
            let r = h * e / sc;
            acc = acc + r * r;
        }
        let err = (acc / T::of(3.0)).sqrt();
        if !err.is_finite() || err > T::one() {
            rejected += 1;
            let fac = if err.is_finite() { (safety * err.powf(T::of(-0.2))).max(fac_min) } else { fac_min };
            h = h * fac.min(T::one());
            continue;
        }

        let mut rcont = [[T::zero(); 3]; 5];
        for i in 0..3 {
            let dy = y1[i] - y[i];
            let bspl = h * ks[0][i] - dy;
            rcont[0][i] = y[i];
            rcont[1][i] = dy;
            rcont[2][i] = bspl;
            rcont[3][i] = dy - h * ks[6][i] - bspl;
            let mut dsum = T::zero();
            for j in 0..7 {
                dsum = dsum + tab.d[j] * ks[j][i];
            }
            rcont[4][i] = h * dsum;
        }
        let step = DenseStep { s0: s, h, rcont };
        let s1 = if last { s_stop } else { s + h };
        let end_state = CurveState::new(s1, y1[0], y1[1], y1[2]);

        let mut found = scan_step(&step, &end_state, p, spec);
        found.sort_by(|a, b| a.s.partial_cmp(&b.s).unwrap_or(std::cmp::Ordering::Equal));
        if let Some(pos) = found.iter().position(|e| is_terminal(e.kind, spec)) {
            let ev = found[pos];
            events.extend_from_slice(&found[..=pos]);
            steps.push(step);
            let branch = DenseBranch::from_steps(kind, steps, ev.state, events);
            return Ok(Trace { branch, reason: TerminalReason::Event(ev.kind), rejected_steps: rejected });
        }
        events.extend(found);
        steps.push(step);

        if y1[1] >= p.z_ceiling {
            let branch = DenseBranch::from_steps(kind, steps, end_state, events);
            return Ok(Trace { branch, reason: TerminalReason::ZCeiling, rejected_steps: rejected });
        }
        if last {
            let reason = if spec.s_end.is_some_and(|e| e <= s_budget) { TerminalReason::SEnd } else { TerminalReason::ArcBudget };
            let branch = DenseBranch::from_steps(kind, steps, end_state, events);
            return Ok(Trace { branch, reason, rejected_steps: rejected });
        }

        s = s1;
        y = y1;
        k1 = ks[6];
        let fac = if err > T::zero() { safety * err.powf(T::of(-0.2)) } else { fac_max };
        h = (h * fac.max(fac_min).min(fac_max)).min(p.h_max);
    }
}

fn is_terminal<T>(kind: EventKind, spec: &EventSpec<T>) -> bool {
    match kind {
        EventKind::VerticalTangent => spec.stop_vertical,
        EventKind::HorizontalTangent => spec.stop_horizontal,
        EventKind::ZAxisCrossing => spec.stop_z_axis,
        EventKind::XAxisApproach => true,
    }
}

const SUBDIV: usize = 4;

/// Finds every event inside one accepted step.
fn scan_step<T: Real>(step: &DenseStep<T>, end: &CurveState<T>, p: &Params<T>, spec: &EventSpec<T>) -> Vec<Event<T>> {
    let s0 = step.s0;
    let s1 = end.s;
    let n = T::from_usize(SUBDIV).expect("small");
    let mut nodes: Vec<CurveState<T>> = (0..SUBDIV)
        .map(|i| step.eval(s0 + (s1 - s0) * T::from_usize(i).expect("small") / n))
        .collect();
    nodes.push(*end);

    let eval = |s: T| if s >= s1 { *end } else { step.eval(s) };
    let mut out = Vec::new();
    let half_pi = T::FRAC_PI_2();

    // theta = m pi/2  <=>  turn = (m - 1) pi/2
    let lo = nodes.iter().map(|st| st.turn).fold(T::infinity(), T::min);
    let hi = nodes.iter().map(|st| st.turn).fold(T::neg_infinity(), T::max);
    let j_lo = (lo / half_pi).floor().to_i64().unwrap_or(0);
    let j_hi = (hi / half_pi).ceil().to_i64().unwrap_or(0);
    for j in j_lo..=j_hi {
        let level = T::from_i64(j).expect("small") * half_pi;
        let m = (j + 1) as i32;
        let kind = if m.rem_euclid(2) == 0 { EventKind::VerticalTangent } else { EventKind::HorizontalTangent };
        let g = |st: &CurveState<T>| st.turn - level;
        for w in nodes.windows(2) {
            if crosses(g(&w[0]), g(&w[1])) {
                let sr = root(&eval, &g, w[0].s, w[1].s, p.event_tol_s);
                out.push(Event { kind, s: sr, state: eval(sr), level: Some(m) });
            }
        }
    }

    let gx = |st: &CurveState<T>| st.x;
    for w in nodes.windows(2) {
        if crosses(gx(&w[0]), gx(&w[1])) {
            let sr = root(&eval, &gx, w[0].s, w[1].s, p.event_tol_s);
            out.push(Event { kind: EventKind::ZAxisCrossing, s: sr, state: eval(sr), level: None });
        }
    }

    let gz = |st: &CurveState<T>| st.z - spec.z_floor;
    for w in nodes.windows(2) {
        let (a, b) = (gz(&w[0]), gz(&w[1]));
        if a > T::zero() && b <= T::zero() {
            let sr = root(&eval, &gz, w[0].s, w[1].s, p.event_tol_s);
            let st = eval(sr);
            out.push(Event { kind: EventKind::XAxisApproach, s: sr, state: st, level: None });
            break;
        }
    }
    out
}

#[inline]
fn crosses<T: Real>(ga: T, gb: T) -> bool {
    (ga < T::zero() && gb >= T::zero()) || (ga > T::zero() && gb <= T::zero())
}

/// Illinois-modified regula falsi on a sign change of `g(eval(s))` in `[a, b]`.
fn root<T: Real, E, G>(eval: &E, g: &G, mut a: T, mut b: T, tol: T) -> T
where
    E: Fn(T) -> CurveState<T>,
    G: Fn(&CurveState<T>) -> T,
{
    let mut fa = g(&eval(a));
    let mut fb = g(&eval(b));
    if fb == T::zero() {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        if (b - a).abs() <= tol {
            break;
        }
        let mut c = (a * fb - b * fa) / (fb - fa);
        if !(c > a.min(b) && c < a.max(b)) {
            c = (a + b) * T::half();
        }
        let fc = g(&eval(c));
        if fc == T::zero() {
            return c;
        }
        if (fc < T::zero()) == (fb < T::zero()) {
            b = c;
            fb = fc;
            if side == -1 {
                fa = fa * T::half();
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb = fb * T::half();
            }
            side = 1;
        }
    }
    // the endpoint past the crossing
    b
}

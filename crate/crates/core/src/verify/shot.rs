use super::gates::{height_gate, ln_bbar_threshold, ln_small_b_threshold, Gate};
use super::{chart_at, interior_samples, CheckParams, CheckResult, CheckStatus, VerifyError, MONOTONE_SLACK, SLACK};
use crate::ode::{CurveState, Params};
use crate::shooting::{ShotReport, Terminal};
use crate::Real;

const CONCAVITY: &str = "first branch bends towards the axis: gamma''(z) < 0";
const ABOVE_CYLINDER: &str = "z(s1) > (-lambda + sqrt(lambda^2 + 4(n-1)))/2";
const BOUNDED: &str = "x stays bounded up to the first vertical tangent";
const S1_HEIGHT: &str = "z(s1) >= sqrt(ln(1 / (2 sqrt(pi) (b + lambda))))";
const S1_ABSCISSA: &str = "-4(3n+1) / (sqrt(ln(1 / (2 sqrt(pi) (b + lambda)))) + 8 lambda) <= x(s1) < 0";
const AXIS_WINDOW: &str = "gamma(z0) = 0 for some z0 in [(-lambda + sqrt(lambda^2 + 4n))/2, sqrt(2nb/(b + lambda))]";
const SLOPE_BOUND: &str = "z(s1) > 3 sqrt(2n) and |gamma'| <= 1/2 on [0, 3 sqrt(2n)]";
const SUPPORT: &str = "(z gamma' - gamma) / sqrt(1 + gamma'^2) is non-increasing on [0, 3 sqrt(2n)]";
const THIRD: &str = "gamma''' < 0 on (0, z(s1)), tested as strict decrease of sampled gamma''";
const GRAPH_RATIO: &str = "gamma(z) > (12n/z) gamma'(z) on [z0, z(s1)), tested as x sin(theta) - 12n cos(theta)/z > 0";
const SINGLE_TURN: &str = "at most one horizontal tangent s_m on (s1, s2); then x(s_m) < lambda and beta'' > 0";
const LEFT_OF_LAMBDA: &str =
    "after s_m: z >= (-lambda + sqrt(lambda^2 + 4(n-1)))/2 gives x < lambda, z >= (lambda + sqrt(lambda^2 + 4(n-1)))/2 gives x < 0";
const S2_BELOW: &str = "z(s2) < (lambda + sqrt(lambda^2 + 4(n-1)))/2";
const S2_POSITIVE: &str = "z(s2) > 0";
const TURN_NEAR_S1: &str = "z(s1) >= (-lambda + 2 sqrt(2) + 2 sqrt(lambda^2 + 4n))/2 gives z(s_m) in [z(s1) - sqrt(2), z(s1))";
const ABSCISSA_WINDOW: &str = "2 x(s1) <= beta(z) < 0 for z in [2 sqrt(2n), z(s1)]";
const S2_HEIGHT: &str = "z(s2) <= 8(n-1) / ((pi - 2) + (16n-1)/sqrt(2n) (-lambda)) (-x(s1)) when beta < 0 on (z(s2), z(s1))";
const RIGHT_OF_AXIS: &str = "small heights reach s_m with z(s_m) in (z(s2), z(s1)) and 0 < x(s2) < infinity";

fn params_of<T: Real>(shot: &ShotReport<T>) -> CheckParams {
    CheckParams { n: shot.n, lambda: shot.lambda.f64(), b: shot.b.f64() }
}

/// Outside `b > -(4n+1) lambda` every judged result becomes a skip that
/// keeps the measured margin in its details.
fn within_regime<T: Real>(shot: &ShotReport<T>, p: &Params<T>, results: Vec<CheckResult>) -> Vec<CheckResult> {
    if p.in_launch_regime(shot.b) {
        return results;
    }
    let bound = (-(T::of(4.0) * p.dim() + T::one()) * p.lambda).f64();
    results
        .into_iter()
        .map(|r| {
            if r.status == CheckStatus::Skipped {
                return r;
            }
            let measured = match r.margin {
                Some(m) => format!("measured margin {m:e}"),
                None => format!("measured: {}", r.details),
            };
            CheckResult::skipped(
                &r.check_id,
                r.params,
                format!("b = {} is not above -(4n+1) lambda = {bound}; {measured}", shot.b),
                &r.statement,
            )
        })
        .collect()
}

fn min_of(it: impl IntoIterator<Item = f64>) -> Option<f64> {
    it.into_iter().fold(None, |acc, v| Some(acc.map_or(v, |a: f64| a.min(v))))
}

fn first_samples<T: Real>(shot: &ShotReport<T>, count: usize) -> Vec<CurveState<T>> {
    interior_samples(&shot.first, count)
}

/// Concavity of the first branch, the height of the first vertical tangent
/// over the cylinder, and boundedness of `x` up to it.
pub fn check_first_branch<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    within_regime(shot, p, first_branch(shot, p, samples))
}

fn first_branch<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    let cp = params_of(shot);
    let mut out = Vec::new();

    let states = first_samples(shot, samples);
    let neg_second: Vec<f64> = states
        .iter()
        .filter_map(|st| chart_at(&shot.first, st, p).map(|(_, g2)| -g2.f64()))
        .collect();
    match min_of(neg_second.iter().copied()) {
        Some(m) => out.push(CheckResult::judged(
            "first_branch_concavity",
            cp,
            m + SLACK,
            format!("min -gamma'' = {m:e} over {} samples", neg_second.len()),
            CONCAVITY,
        )),
        None => out.push(CheckResult::failed("first_branch_concavity", cp, "no chart samples".into(), CONCAVITY)),
    }

    match shot.s1 {
        Some(s1) => {
            let cyl = p.cylinder_radius().f64();
            let z1 = s1.state.z.f64();
            out.push(CheckResult::judged(
                "s1_above_cylinder",
                cp,
                z1 - cyl + SLACK,
                format!("z(s1) = {z1}, cylinder radius {cyl}"),
                ABOVE_CYLINDER,
            ));
        }
        None => out.push(CheckResult::failed("s1_above_cylinder", cp, "no first vertical tangent".into(), ABOVE_CYLINDER)),
    }

    let max_x = states.iter().chain(shot.s1.iter().map(|e| &e.state)).map(|st| st.x.f64().abs()).fold(0.0, f64::max);
    let bound = p.z_ceiling.f64();
    if shot.s1.is_some() && max_x.is_finite() {
        out.push(CheckResult::judged(
            "first_branch_bounded",
            cp,
            bound - max_x,
            format!("max |x| = {max_x} against guard {bound}"),
            BOUNDED,
        ));
    } else {
        out.push(CheckResult::failed(
            "first_branch_bounded",
            cp,
            format!("first branch ended without a vertical tangent, max |x| = {max_x}"),
            BOUNDED,
        ));
    }
    out
}

fn log_bound<T: Real>(shot: &ShotReport<T>, p: &Params<T>) -> Result<f64, String> {
    let bl = (shot.b + p.lambda).f64();
    let cut = 1.0 / (2.0 * std::f64::consts::PI.sqrt());
    if !p.in_launch_regime(shot.b) {
        return Err(format!("b = {} is not above -(4n+1) lambda", shot.b));
    }
    if !(bl > 0.0 && bl < cut) {
        return Err(format!("b + lambda = {bl} is outside (0, 1/(2 sqrt(pi))) where the logarithm is positive"));
    }
    Ok((1.0 / (2.0 * std::f64::consts::PI.sqrt() * bl)).ln().sqrt())
}

fn axis_window<T: Real>(shot: &ShotReport<T>, p: &Params<T>) -> (f64, f64) {
    let (b, l) = (shot.b.f64(), p.lambda.f64());
    (p.sphere_radius().f64(), (2.0 * f64::from(p.n) * b / (b + l)).sqrt())
}

fn axis_window_result<T: Real>(id: &str, shot: &ShotReport<T>, p: &Params<T>, statement: &str) -> Result<CheckResult, VerifyError> {
    let cp = params_of(shot);
    let z0 = shot.z0.ok_or(VerifyError::MissingZ0 { b: cp.b })?.state.z.f64();
    let (lo, hi) = axis_window(shot, p);
    Ok(CheckResult::judged(
        id,
        cp,
        (z0 - lo).min(hi - z0) + SLACK,
        format!("z0 = {z0} in [{lo}, {hi}]"),
        statement,
    ))
}

/// Height and abscissa of the first vertical tangent and the z-axis
/// crossing window, where `b + lambda` keeps the logarithm positive.
pub fn check_s1_estimates<T: Real>(shot: &ShotReport<T>, p: &Params<T>) -> Result<Vec<CheckResult>, VerifyError> {
    let cp = params_of(shot);
    let ids = [("s1_height_lower_bound", S1_HEIGHT), ("s1_abscissa_window", S1_ABSCISSA), ("axis_crossing_window", AXIS_WINDOW)];
    let lb = match log_bound(shot, p) {
        Ok(v) => v,
        Err(reason) => return Ok(ids.iter().map(|(id, st)| CheckResult::skipped(id, cp, reason.clone(), st)).collect()),
    };
    let Some(s1) = shot.s1 else {
        return Ok(ids.iter().map(|(id, st)| CheckResult::failed(id, cp, "no first vertical tangent".into(), st)).collect());
    };
    let (x1, z1) = (s1.state.x.f64(), s1.state.z.f64());
    let mut out = vec![CheckResult::judged(ids[0].0, cp, z1 - lb + SLACK, format!("z(s1) = {z1}, bound {lb}"), S1_HEIGHT)];
    let denom = lb + 8.0 * p.lambda.f64();
    if denom > 0.0 {
        let lo = -4.0 * (3.0 * f64::from(p.n) + 1.0) / denom;
        out.push(CheckResult::judged(
            ids[1].0,
            cp,
            (x1 - lo).min(-x1) + SLACK,
            format!("x(s1) = {x1} in [{lo}, 0)"),
            S1_ABSCISSA,
        ));
    } else {
        out.push(CheckResult::skipped(ids[1].0, cp, format!("denominator {denom} is not positive"), S1_ABSCISSA));
    }
    out.push(axis_window_result(ids[2].0, shot, p, AXIS_WINDOW)?);
    Ok(out)
}

fn slope_hypothesis<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: &[CurveState<T>]) -> (Option<f64>, f64) {
    let zc = 3.0 * (2.0 * f64::from(p.n)).sqrt();
    let max_slope = samples
        .iter()
        .filter(|st| st.z.f64() <= zc)
        .filter_map(|st| chart_at(&shot.first, st, p).map(|(g1, _)| g1.f64().abs()))
        .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
    (max_slope, zc)
}

/// Estimates that hold for extremely small initial heights. Each is gated
/// on its own hypotheses; thresholds are compared in log space.
pub fn check_small_b<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    let cp = params_of(shot);
    let n = f64::from(p.n);
    let states = first_samples(shot, samples);
    let (max_slope, zc) = slope_hypothesis(shot, p, &states);
    let z1 = shot.s1.map(|e| e.state.z.f64());
    let mut out = Vec::new();

    let small = height_gate(ln_small_b_threshold(p.n), shot.b, p, "small-height threshold");
    let has_s1 = |g: Gate| g.and(|| Gate::when(z1.is_some(), || "no first vertical tangent".into()));

    // slope bound
    match has_s1(small.clone()) {
        Gate::Open => {
            let z1 = z1.expect("gated");
            let slope_margin = max_slope.map_or(f64::NEG_INFINITY, |m| 0.5 - m);
            out.push(CheckResult::judged(
                "small_b_slope_bound",
                cp,
                (z1 - zc).min(slope_margin) + SLACK,
                format!("z(s1) = {z1} vs {zc}, max |gamma'| = {max_slope:?}"),
                SLOPE_BOUND,
            ));
        }
        Gate::Closed(r) => out.push(CheckResult::skipped("small_b_slope_bound", cp, r, SLOPE_BOUND)),
    }

    let shape_gate = Gate::when(p.in_launch_regime(shot.b), || "b is not above -(4n+1) lambda".into())
        .and(|| {
            let cut = 1.0 / (3.0 * (2.0 * n).sqrt());
            Gate::when(shot.b.f64() < cut, || format!("b = {} is not below 1/(3 sqrt(2n)) = {cut}", shot.b))
        })
        .and(|| Gate::when(z1.is_some_and(|z| z > zc), || format!("z(s1) = {z1:?} does not exceed 3 sqrt(2n) = {zc}")))
        .and(|| {
            Gate::when(max_slope.is_some_and(|m| m <= 0.5), || format!("max |gamma'| on [0, {zc}] is {max_slope:?}"))
        });

    // support quantity
    match &shape_gate {
        Gate::Open => {
            let q: Vec<f64> = states.iter().filter(|st| st.z.f64() <= zc).map(|st| support_quantity(st).f64()).collect();
            let worst = q.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            let worst = if worst.is_finite() { worst } else { 0.0 };
            out.push(CheckResult::judged(
                "small_b_support_monotone",
                cp,
                -worst + SLACK,
                format!("largest increase {worst:e} over {} samples", q.len()),
                SUPPORT,
            ));
        }
        Gate::Closed(r) => out.push(CheckResult::skipped("small_b_support_monotone", cp, r.clone(), SUPPORT)),
    }

    // third derivative
    match &shape_gate {
        Gate::Open => {
            let g2: Vec<f64> = states.iter().filter_map(|st| chart_at(&shot.first, st, p).map(|(_, g)| g.f64())).collect();
            let worst = g2.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            out.push(CheckResult::judged(
                "small_b_third_derivative",
                cp,
                -worst + MONOTONE_SLACK,
                format!("largest increase of gamma'' {worst:e} over {} samples", g2.len()),
                THIRD,
            ));
        }
        Gate::Closed(r) => out.push(CheckResult::skipped("small_b_third_derivative", cp, r.clone(), THIRD)),
    }

    // axis crossing
    match small.clone() {
        Gate::Open => out.push(
            axis_window_result("small_b_axis_crossing", shot, p, AXIS_WINDOW).unwrap_or_else(|e| {
                CheckResult::failed("small_b_axis_crossing", cp, e.to_string(), AXIS_WINDOW)
            }),
        ),
        Gate::Closed(r) => out.push(CheckResult::skipped("small_b_axis_crossing", cp, r, AXIS_WINDOW)),
    }

    // graph ratio
    let (lo, hi) = axis_window(shot, p);
    let z0 = shot.z0.map(|e| e.state.z.f64());
    let ratio_gate = has_s1(small)
        .and(|| Gate::when(z1.is_some_and(|z| z > zc), || format!("z(s1) = {z1:?} does not exceed {zc}")))
        .and(|| Gate::when(z0.is_some_and(|z| z >= lo && z <= hi), || format!("z0 = {z0:?} not in [{lo}, {hi}]")));
    match ratio_gate {
        Gate::Open => {
            let z0 = z0.expect("gated");
            let vals = states.iter().filter(|st| st.z.f64() >= z0).map(|st| {
                let (x, z) = (st.x.f64(), st.z.f64());
                x * st.sin_theta().f64() - 12.0 * n * st.cos_theta().f64() / z
            });
            match min_of(vals) {
                Some(m) => out.push(CheckResult::judged(
                    "small_b_graph_ratio",
                    cp,
                    m + SLACK,
                    format!("min of x sin - 12n cos / z on [z0, z(s1)) is {m:e}"),
                    GRAPH_RATIO,
                )),
                None => out.push(CheckResult::skipped("small_b_graph_ratio", cp, "no samples above z0".into(), GRAPH_RATIO)),
            }
        }
        Gate::Closed(r) => out.push(CheckResult::skipped("small_b_graph_ratio", cp, r, GRAPH_RATIO)),
    }
    out
}

/// `(z gamma' - gamma) / sqrt(1 + gamma'^2)` on the first branch, which
/// equals `z cos(theta) - x sin(theta)` while `sin(theta) > 0`.
pub(crate) fn support_quantity<T: Real>(st: &CurveState<T>) -> T {
    st.z * st.cos_theta() - st.x * st.sin_theta()
}

/// Shape of the second branch from the first vertical tangent to the second.
pub fn check_second_branch<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    within_regime(shot, p, second_branch(shot, p, samples))
}

fn second_branch<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    let cp = params_of(shot);
    let ids = [
        ("second_branch_single_turn", SINGLE_TURN),
        ("second_branch_left_of_lambda", LEFT_OF_LAMBDA),
        ("s2_below_shifted_cylinder", S2_BELOW),
        ("s2_positive_height", S2_POSITIVE),
        ("turn_point_near_s1", TURN_NEAR_S1),
        ("second_branch_abscissa_window", ABSCISSA_WINDOW),
        ("s2_height_bound", S2_HEIGHT),
        ("s2_right_of_axis", RIGHT_OF_AXIS),
    ];
    let (Some(second), Some(s1)) = (shot.second.as_ref(), shot.s1) else {
        let gate = height_gate(ln_bbar_threshold(p.n), shot.b, p, "second-branch threshold");
        return ids
            .iter()
            .enumerate()
            .map(|(i, (id, st))| {
                let reason = match &gate {
                    Gate::Closed(r) if i == 5 || i == 6 => format!("{r}; no second branch"),
                    _ => "no second branch".into(),
                };
                CheckResult::skipped(id, cp, reason, st)
            })
            .collect();
    };
    let has_s2 = shot.terminal == Terminal::SecondVerticalTangent && shot.s2.is_some();
    let states = interior_samples(second, samples);
    let lambda = p.lambda.f64();
    let (x1, z1) = (s1.state.x.f64(), s1.state.z.f64());
    let sm = shot.sm;
    let horizontals = second.events_of(crate::ode::EventKind::HorizontalTangent).count();
    let mut out = Vec::new();
    let no_s2 = || format!("no second vertical tangent ({:?})", shot.terminal);

    // single turn
    if !has_s2 {
        out.push(CheckResult::skipped(ids[0].0, cp, no_s2(), SINGLE_TURN));
    } else if horizontals > 1 {
        out.push(CheckResult::judged(
            ids[0].0,
            cp,
            1.0 - horizontals as f64,
            format!("{horizontals} horizontal tangents"),
            SINGLE_TURN,
        ));
    } else if let Some(sm) = sm {
        let xm = sm.state.x.f64();
        let convex = states.iter().filter_map(|st| chart_at(second, st, p).map(|(_, b2)| b2.f64()));
        let min_b2 = min_of(convex).unwrap_or(f64::NEG_INFINITY);
        out.push(CheckResult::judged(
            ids[0].0,
            cp,
            (lambda - xm).min(min_b2) + SLACK,
            format!("x(s_m) = {xm}, min beta'' = {min_b2:e}"),
            SINGLE_TURN,
        ));
    } else {
        out.push(CheckResult::skipped(ids[0].0, cp, "no horizontal tangent".into(), SINGLE_TURN));
    }

    // left of lambda after s_m
    match (has_s2, sm) {
        (true, Some(sm)) => {
            let cyl = p.cylinder_radius().f64();
            let shifted = p.shifted_cylinder_radius().f64();
            let after = states.iter().filter(|st| st.s > sm.s);
            let mut margins = Vec::new();
            for st in after {
                let (x, z) = (st.x.f64(), st.z.f64());
                if z >= cyl {
                    margins.push(lambda - x);
                }
                if z >= shifted {
                    margins.push(-x);
                }
            }
            match min_of(margins.iter().copied()) {
                Some(m) => out.push(CheckResult::judged(
                    ids[1].0,
                    cp,
                    m + SLACK,
                    format!("{} applicable samples", margins.len()),
                    LEFT_OF_LAMBDA,
                )),
                None => out.push(CheckResult::skipped(
                    ids[1].0,
                    cp,
                    "no sample after s_m reaches either height".into(),
                    LEFT_OF_LAMBDA,
                )),
            }
        }
        (true, None) => out.push(CheckResult::skipped(ids[1].0, cp, "no horizontal tangent".into(), LEFT_OF_LAMBDA)),
        _ => out.push(CheckResult::skipped(ids[1].0, cp, no_s2(), LEFT_OF_LAMBDA)),
    }

    // heights at s2
    let z2 = shot.s2.map(|e| e.state.z.f64());
    let x2 = shot.s2.map(|e| e.state.x.f64());
    match (has_s2, sm, z2) {
        (true, Some(_), Some(z2)) => {
            let shifted = p.shifted_cylinder_radius().f64();
            out.push(CheckResult::judged(ids[2].0, cp, shifted - z2 + SLACK, format!("z(s2) = {z2}, bound {shifted}"), S2_BELOW));
            out.push(CheckResult::judged(ids[3].0, cp, z2 + SLACK, format!("z(s2) = {z2}"), S2_POSITIVE));
        }
        (true, None, _) => {
            out.push(CheckResult::skipped(ids[2].0, cp, "no horizontal tangent".into(), S2_BELOW));
            out.push(CheckResult::skipped(ids[3].0, cp, "no horizontal tangent".into(), S2_POSITIVE));
        }
        _ => {
            out.push(CheckResult::skipped(ids[2].0, cp, no_s2(), S2_BELOW));
            out.push(CheckResult::skipped(ids[3].0, cp, no_s2(), S2_POSITIVE));
        }
    }

    // turn point near s1
    let lim = (-lambda + 2.0 * 2f64.sqrt() + 2.0 * (lambda * lambda + 4.0 * f64::from(p.n)).sqrt()) / 2.0;
    if z1 >= lim {
        match sm {
            Some(sm) => {
                let zm = sm.state.z.f64();
                out.push(CheckResult::judged(
                    ids[4].0,
                    cp,
                    (zm - (z1 - 2f64.sqrt())).min(z1 - zm) + SLACK,
                    format!("z(s_m) = {zm} in [{}, {z1})", z1 - 2f64.sqrt()),
                    TURN_NEAR_S1,
                ));
            }
            None => out.push(CheckResult::failed(ids[4].0, cp, "no horizontal tangent".into(), TURN_NEAR_S1)),
        }
    } else {
        out.push(CheckResult::skipped(ids[4].0, cp, format!("z(s1) = {z1} is below {lim}"), TURN_NEAR_S1));
    }

    // window estimates for the tiniest heights
    let n = f64::from(p.n);
    let zw = 2.0 * (2.0 * n).sqrt();
    let zm = sm.map(|e| e.state.z.f64());
    let window_gate = height_gate(ln_bbar_threshold(p.n), shot.b, p, "second-branch threshold")
        .and(|| Gate::when(zm.is_some_and(|z| z > zw), || format!("z(s_m) = {zm:?} does not exceed 2 sqrt(2n) = {zw}")))
        .and(|| {
            let cut = -1.0 / (8.0 * (2.0 * n).sqrt());
            Gate::when(x1 >= cut, || format!("x(s1) = {x1} is below -1/(8 sqrt(2n)) = {cut}"))
        });
    match &window_gate {
        Gate::Open => {
            let vals = states
                .iter()
                .filter(|st| st.z.f64() >= zw && sm.is_some_and(|m| st.s <= m.s))
                .map(|st| (st.x.f64() - 2.0 * x1).min(-st.x.f64()));
            match min_of(vals) {
                Some(m) => out.push(CheckResult::judged(ids[5].0, cp, m + SLACK, format!("min margin {m:e}"), ABSCISSA_WINDOW)),
                None => out.push(CheckResult::skipped(ids[5].0, cp, "no samples in the window".into(), ABSCISSA_WINDOW)),
            }
        }
        Gate::Closed(r) => out.push(CheckResult::skipped(ids[5].0, cp, r.clone(), ABSCISSA_WINDOW)),
    }
    let negative = states.iter().all(|st| st.x < T::zero());
    match window_gate.and(|| Gate::when(has_s2, no_s2)).and(|| Gate::when(negative, || "beta changes sign".into())) {
        Gate::Open => {
            let z2 = z2.expect("gated");
            let bound = 8.0 * (n - 1.0) / ((std::f64::consts::PI - 2.0) + (16.0 * n - 1.0) / (2.0 * n).sqrt() * (-lambda)) * (-x1);
            out.push(CheckResult::judged(ids[6].0, cp, bound - z2 + SLACK, format!("z(s2) = {z2}, bound {bound}"), S2_HEIGHT));
        }
        Gate::Closed(r) => out.push(CheckResult::skipped(ids[6].0, cp, r, S2_HEIGHT)),
    }

    // right of the axis: gated on the regime where the first-branch
    // logarithmic estimates are defined
    match log_bound(shot, p) {
        Ok(_) if has_s2 => match (sm, x2, z2) {
            (Some(sm), Some(x2), Some(z2)) => {
                let zm = sm.state.z.f64();
                let m = x2.min(zm - z2).min(z1 - zm) + SLACK;
                out.push(CheckResult::judged(
                    ids[7].0,
                    cp,
                    m,
                    format!("x(s2) = {x2}, z(s2) = {z2} < z(s_m) = {zm} < z(s1) = {z1}"),
                    RIGHT_OF_AXIS,
                ));
            }
            _ => out.push(CheckResult::failed(ids[7].0, cp, "no horizontal tangent".into(), RIGHT_OF_AXIS)),
        },
        Ok(_) => out.push(CheckResult::failed(ids[7].0, cp, no_s2(), RIGHT_OF_AXIS)),
        Err(r) => out.push(CheckResult::skipped(ids[7].0, cp, r, RIGHT_OF_AXIS)),
    }
    out
}

/// All shot checks, with the sample count doubled from `samples` until
/// every check's status agrees between consecutive resolutions (at most
/// four doublings).
pub fn verify_shot<T: Real>(shot: &ShotReport<T>, p: &Params<T>, samples: usize) -> Vec<CheckResult> {
    let run = |k: usize| {
        let mut v = check_first_branch(shot, p, k);
        match check_s1_estimates(shot, p) {
            Ok(r) => v.extend(r),
            Err(e) => v.push(CheckResult::failed("axis_crossing_window", params_of(shot), e.to_string(), AXIS_WINDOW)),
        }
        v.extend(check_small_b(shot, p, k));
        v.extend(check_second_branch(shot, p, k));
        v
    };
    let mut k = samples.max(8);
    let mut prev = run(k);
    for _ in 0..4 {
        k *= 2;
        let next = run(k);
        let same = prev.len() == next.len() && prev.iter().zip(&next).all(|(a, b)| a.status == b.status);
        prev = next;
        if same {
            break;
        }
    }
    prev
}

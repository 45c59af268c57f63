//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so the lines are always printed.

mod common;

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::B0_N2_LAMBDA0;
use lambda_sphere::geometry::{mesh_obj, parse_obj, parse_profile_csv, profile_csv, resample_arclength, revolve};
use lambda_sphere::ode::{rhs, ExactCurve};
use lambda_sphere::shooting::{bisect_b0, bracket_scan, close_profile, default_b_min, shoot, Terminal};
use lambda_sphere::verify::{
    check_b0, check_self_intersections, count_self_intersections, exact_residual, ln_bbar_threshold,
    ln_small_b_threshold, sphere_reintegration, verify_shot, CheckResult, CheckStatus, PRACTICAL_B_FLOOR,
};
use lambda_sphere::{ClosedProfile64, DenseBranch64, Params64, ShotReport64};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

const SAMPLES: usize = 1000;
const TOL_B: f64 = 1e-12;
const TOL_F: f64 = 1e-9;
const PROFILE_H: f64 = 0.01;

fn params(n: u32, lambda: f64) -> Params64 {
    Params64::new(n, lambda).expect("valid parameters")
}

fn find_b0(p: &Params64) -> Result<ClosedProfile64, String> {
    let scan = bracket_scan(p, default_b_min(p), p.sphere_radius(), 32).map_err(|e| e.to_string())?;
    let bis = bisect_b0(scan.bracket, p, TOL_B, TOL_F).map_err(|e| e.to_string())?;
    close_profile(&bis.report, p, TOL_F).map_err(|e| e.to_string())
}

fn failures(records: &[CheckResult]) -> Vec<String> {
    records.iter().filter(|r| r.failed_check()).map(|r| format!("{} at b = {}: {}", r.check_id, r.params.b, r.details)).collect()
}

fn geometric(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo * (r * i as f64).exp() }).collect()
}

fn exact_residuals() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2, 3, 5] {
        for lambda in [0.0, -0.05, -0.5] {
            let p = params(n, lambda);
            let sphere = exact_residual(ExactCurve::sphere(&p), PI * p.sphere_radius(), &p, SAMPLES);
            let cylinder = exact_residual(ExactCurve::cylinder(&p, 0.0), 10.0, &p, SAMPLES);
            ensure!(sphere <= 1e-12, "sphere residual {sphere:e} at n = {n}, lambda = {lambda}");
            ensure!(cylinder <= 1e-12, "cylinder residual {cylinder:e} at n = {n}, lambda = {lambda}");
            worst = worst.max(sphere).max(cylinder);
        }
    }
    Ok(format!("max residual {worst:e} over 9 parameter pairs"))
}

fn circle_reintegration() -> Outcome {
    let mut notes = Vec::new();
    for lambda in [0.0, -0.05] {
        let p = params(2, lambda);
        let a = p.sphere_radius();
        let shot = shoot(a, &p).map_err(|e| e.to_string())?;
        let Terminal::AxisHit { x_at_axis } = shot.terminal else {
            return Err(format!("lambda = {lambda}: terminal {:?}", shot.terminal));
        };
        ensure!((x_at_axis + a).abs() <= 1e-6, "lambda = {lambda}: axis hit at {x_at_axis}");
        let dev = sphere_reintegration(&p, SAMPLES).map_err(|e| e.to_string())?.max_deviation();
        ensure!(dev <= 1e-8, "lambda = {lambda}: radial deviation {dev:e} at default tolerances");

        let mut errs = Vec::new();
        for k in 8..=12 {
            let rel = 10f64.powi(-k);
            let pt = p.with_tolerances(rel, rel * 1e-2).map_err(|e| e.to_string())?;
            errs.push(sphere_reintegration(&pt, SAMPLES).map_err(|e| e.to_string())?.max_deviation());
        }
        ensure!(
            errs.windows(2).all(|w| w[1] < w[0]),
            "lambda = {lambda}: deviation not decreasing over rel_tol 1e-8..1e-12: {errs:?}"
        );
        notes.push(format!("lambda {lambda}: dev {dev:.2e}, {:.1e} -> {:.1e}", errs[0], errs[4]));
    }
    Ok(notes.join("; "))
}

fn self_shrinker_case() -> Outcome {
    let p = params(2, 0.0);
    let prof = find_b0(&p)?;
    let (b0, z2) = (prof.b0, prof.junction.z);
    ensure!(prof.x_junction_raw.abs() <= 1e-9, "|x(s2)| = {:e}", prof.x_junction_raw.abs());
    ensure!(b0 < 2f64.sqrt(), "b0 = {b0}");
    ensure!(z2 > 0.0 && z2 < 1.0, "z(s2) = {z2}");
    let report = count_self_intersections(&prof, PROFILE_H).map_err(|e| e.to_string())?;
    ensure!(report.count == 2, "{} self-intersections", report.count);

    let (start, end) = (prof.eval(0.0), prof.eval(prof.total_length()));
    ensure!((start.x - b0).abs() <= 1e-12 && start.z == 0.0, "start {start:?}");
    ensure!((end.x + b0).abs() <= 1e-12 && end.z.abs() <= 1e-12, "end {end:?}");
    for st in [start, end] {
        let k = (st.theta() - FRAC_PI_2) / PI;
        ensure!((k - k.round()).abs() <= 1e-9, "endpoint angle {} is not perpendicular", st.theta());
    }
    ensure!((b0 - B0_N2_LAMBDA0).abs() <= 1e-6, "b0 = {b0} vs oracle {B0_N2_LAMBDA0}");
    Ok(format!("b0 = {b0:.12}, z(s2) = {z2:.6}, {} crossings", report.count))
}

fn negative_lambda_cases() -> Outcome {
    let mut notes = Vec::new();
    for (n, lambda, mesh) in [(2, -0.05, true), (2, -0.1, true), (3, -0.05, false)] {
        let p = params(n, lambda);
        let prof = find_b0(&p)?;
        let mut records = check_b0(&prof, &p, TOL_F);
        let (more, report) = check_self_intersections(&prof, PROFILE_H).map_err(|e| e.to_string())?;
        records.extend(more);
        ensure!(records.iter().all(CheckResult::passed), "n = {n}, lambda = {lambda}: {:?}", failures(&records));
        if mesh {
            let m = revolve(&resample_arclength(&prof, 0.05), 64, n, lambda).map_err(|e| e.to_string())?;
            ensure!(m.is_watertight() && m.euler_characteristic() == 2, "n = {n}, lambda = {lambda}: mesh not closed");
        }
        notes.push(format!("n {n} lambda {lambda}: b0 = {:.10}, {} crossings", prof.b0, report.count));
    }
    Ok(notes.join("; "))
}

const CORE_CHECKS: [&str; 11] = [
    "first_branch_concavity",
    "s1_above_cylinder",
    "first_branch_bounded",
    "s1_height_lower_bound",
    "s1_abscissa_window",
    "axis_crossing_window",
    "second_branch_single_turn",
    "second_branch_left_of_lambda",
    "s2_below_shifted_cylinder",
    "s2_positive_height",
    "s2_right_of_axis",
];

fn sweep_shot(b: f64, p: &Params64) -> Result<Vec<CheckResult>, String> {
    let shot = shoot(b, p).map_err(|e| format!("b = {b}: {e}"))?;
    Ok(verify_shot(&shot, p, SAMPLES))
}

fn estimate_sweep() -> Outcome {
    let mut records = Vec::new();
    for lambda in [0.0, -1e-4] {
        let p = params(2, lambda);
        for b in geometric(1e-3, 0.3, 12) {
            records.extend(sweep_shot(b, &p)?);
        }
    }
    let bad = failures(&records);
    ensure!(bad.is_empty(), "{} failures: {bad:?}", bad.len());
    for r in records.iter().filter(|r| CORE_CHECKS.contains(&r.check_id.as_str()) && r.margin.is_some()) {
        ensure!(r.margin.is_some_and(|m| m > 0.0), "{} at b = {} has margin {:?}", r.check_id, r.params.b, r.margin);
    }
    let passed = records.iter().filter(|r| r.passed()).count();
    let skipped = records.iter().filter(|r| r.status == CheckStatus::Skipped).count();

    // a height inside the small-height regime, where those estimates run
    let tiny = sweep_shot(1e-18, &params(2, 0.0))?;
    let bad = failures(&tiny);
    ensure!(bad.is_empty(), "b = 1e-18: {bad:?}");
    let small_passed = tiny.iter().filter(|r| r.check_id.starts_with("small_b_") && r.passed()).count();
    ensure!(small_passed == 5, "only {small_passed} small-height checks ran at b = 1e-18");
    Ok(format!("{} records, {passed} passed, {skipped} skipped, 0 failed; 5 small-height checks pass at b = 1e-18", records.len()))
}

fn arc_length_and_continuity(branch: &DenseBranch64, p: &Params64) -> Result<(), String> {
    let states = branch.states();
    for w in states.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (c, s) = (a.cos_theta(), a.sin_theta());
        ensure!((c * c + s * s - 1.0).abs() <= 4.0 * f64::EPSILON, "unit tangent violated at s = {}", a.s);
        let h = b.s - a.s;
        ensure!((b.x - a.x).hypot(b.z - a.z) <= h + 1e-12, "chord longer than arc at s = {}", a.s);
        let rate = (0..=8)
            .filter_map(|k| rhs(&branch.eval(a.s + h * f64::from(k) / 8.0), p).ok())
            .map(|d| d.dtheta_ds.abs())
            .fold(0.0, f64::max);
        ensure!((b.turn - a.turn).abs() <= 1.05 * rate * h + 1e-12, "theta jumps at s = {}", a.s);
    }
    Ok(())
}

fn terminal_gap(a: &ShotReport64, b: &ShotReport64) -> Result<f64, String> {
    let gap = match (&a.terminal, &b.terminal, a.s2, b.s2) {
        (Terminal::SecondVerticalTangent, Terminal::SecondVerticalTangent, Some(e), Some(f)) => {
            (e.state.x - f.state.x).abs().max((e.state.z - f.state.z).abs())
        }
        (Terminal::AxisHit { x_at_axis: x }, Terminal::AxisHit { x_at_axis: y }, _, _) => (x - y).abs(),
        (t, u, _, _) => return Err(format!("terminals differ: {t:?} vs {u:?}")),
    };
    Ok(gap)
}

fn property_suite() -> Outcome {
    let p = params(2, 0.0);
    let prof = find_b0(&p)?;

    // arc length and theta continuity along accepted branches
    for b in [0.05, prof.b0, 0.8, p.sphere_radius()] {
        let shot = shoot(b, &p).map_err(|e| e.to_string())?;
        for br in std::iter::once(&shot.first).chain(shot.second.as_ref()) {
            arc_length_and_continuity(br, &p).map_err(|e| format!("b = {b}: {e}"))?;
        }
    }

    // launch offset
    let tight = p.with_tolerances(1e-13, 1e-12).map_err(|e| e.to_string())?;
    let mut half = tight;
    half.axis_eps = tight.axis_eps / 2.0;
    let mut worst_gap = 0.0f64;
    for b in [0.05, prof.b0, 0.8, p.sphere_radius()] {
        let (r1, r2) = (shoot(b, &tight).map_err(|e| e.to_string())?, shoot(b, &half).map_err(|e| e.to_string())?);
        let gap = terminal_gap(&r1, &r2).map_err(|e| format!("b = {b}: {e}"))?;
        ensure!(gap <= 10.0 * tight.abs_tol, "b = {b}: launch offsets disagree by {gap:e}");
        worst_gap = worst_gap.max(gap);
    }

    // determinism
    let (r1, r2) = (shoot(prof.b0, &p).map_err(|e| e.to_string())?, shoot(prof.b0, &p).map_err(|e| e.to_string())?);
    let bits = |r: &ShotReport64| {
        std::iter::once(&r.first).chain(r.second.as_ref()).flat_map(|br| br.states()).flat_map(|s| [s.s, s.x, s.z, s.turn]).map(f64::to_bits).collect::<Vec<_>>()
    };
    ensure!(r1 == r2 && bits(&r1) == bits(&r2), "repeated shots differ");
    let j1 = serde_json::to_string(&r1).map_err(|e| e.to_string())?;
    ensure!(j1 == serde_json::to_string(&r2).map_err(|e| e.to_string())?, "serialised shots differ");

    // crossing count under refinement
    for lambda in [0.0, -0.05] {
        let q = params(2, lambda);
        let pr = if lambda == 0.0 { prof.clone() } else { find_b0(&q)? };
        let c1 = count_self_intersections(&pr, PROFILE_H).map_err(|e| e.to_string())?.count;
        let c2 = count_self_intersections(&pr, PROFILE_H / 2.0).map_err(|e| e.to_string())?.count;
        ensure!(c1 == c2, "lambda = {lambda}: {c1} crossings at h = {PROFILE_H}, {c2} at h/2");
    }

    // mesh
    let pts = resample_arclength(&prof, 0.05);
    let mesh = revolve(&pts, 128, 2, 0.0).map_err(|e| e.to_string())?;
    ensure!(mesh.is_watertight(), "mesh not watertight");
    ensure!(mesh.euler_characteristic() == 2, "V - E + F = {}", mesh.euler_characteristic());

    // round trips
    let rows = parse_profile_csv(&profile_csv(&pts)).map_err(|e| e.to_string())?;
    ensure!(rows.len() == pts.len(), "csv row count");
    for (r, st) in rows.iter().zip(&pts) {
        let same = [r[0], r[1], r[2], r[3]].iter().zip([st.s, st.x, st.z, st.theta()]).all(|(a, b)| a.to_bits() == b.to_bits());
        ensure!(same, "csv row at s = {} does not round-trip", st.s);
    }
    let (v, f) = parse_obj(&mesh_obj(&mesh)).map_err(|e| e.to_string())?;
    ensure!(f == mesh.faces, "obj faces differ");
    ensure!(
        v.len() == mesh.vertices.len() && v.iter().zip(&mesh.vertices).all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())),
        "obj vertices differ"
    );
    Ok(format!(
        "launch offset gap {worst_gap:.1e}, {} vertices, chi = {}",
        mesh.vertices.len(),
        mesh.euler_characteristic()
    ))
}

const FULL_STRENGTH: [&str; 5] = [
    "small_b_slope_bound",
    "small_b_axis_crossing",
    "small_b_graph_ratio",
    "second_branch_abscissa_window",
    "s2_height_bound",
];

fn full_strength_gates() -> Outcome {
    let floor = PRACTICAL_B_FLOOR.ln();
    let mut skipped = 0;
    for n in [3, 4, 5, 8] {
        ensure!(ln_small_b_threshold(n) < floor, "n = {n}: small-height threshold is representable");
        ensure!(ln_bbar_threshold(n) < floor, "n = {n}: second-branch threshold is representable");
        ensure!(ln_bbar_threshold(n).is_finite(), "n = {n}: threshold not finite in log space");
        for lambda in [0.0, -0.05] {
            let p = params(n, lambda);
            for b in [1e-18, 1e-6, 1e-3, 0.1] {
                for r in sweep_shot(b, &p)?.iter().filter(|r| FULL_STRENGTH.contains(&r.check_id.as_str())) {
                    ensure!(r.status == CheckStatus::Skipped, "{} at n = {n}, b = {b} is {:?}", r.check_id, r.status);
                    ensure!(r.details.contains("practical floor"), "{} skip reason: {}", r.check_id, r.details);
                    skipped += 1;
                }
            }
        }
    }
    Ok(format!("{skipped} skipped records; ln of the n = 3 thresholds {:.1}, {:.1} vs floor {floor:.1}", ln_small_b_threshold(3), ln_bbar_threshold(3)))
}

struct Criterion {
    name: &'static str,
    limit: Duration,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { name: "1 exact-solution residuals", limit: Duration::from_secs(1), run: exact_residuals },
        Criterion { name: "2 integrator reproduces the circle", limit: Duration::from_secs(5), run: circle_reintegration },
        Criterion { name: "3 closing height, lambda = 0, n = 2", limit: Duration::from_secs(30), run: self_shrinker_case },
        Criterion { name: "4 closing height, lambda < 0", limit: Duration::from_secs(60), run: negative_lambda_cases },
        Criterion { name: "5 estimate sweep", limit: Duration::from_secs(120), run: estimate_sweep },
        Criterion { name: "6 property suite", limit: Duration::from_secs(60), run: property_suite },
        Criterion { name: "7 full-strength gates skip for n >= 3", limit: Duration::from_secs(60), run: full_strength_gates },
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for c in &criteria {
        if !filter.is_empty() && !filter.iter().any(|f| c.name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|d| {
            if elapsed <= c.limit {
                Ok(d)
            } else {
                Err(format!("took {elapsed:.2?}, limit {:?}", c.limit))
            }
        });
        match result {
            Ok(d) => println!("PASS criterion {} ({elapsed:.2?}): {d}", c.name),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {} ({elapsed:.2?}): {d}", c.name);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

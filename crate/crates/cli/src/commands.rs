use lambda_sphere::geometry::{mesh_obj, profile_csv, profile_svg, report_json, resample_arclength, revolve, SvgMarker};
use lambda_sphere::ode::{CurveState, Event};
use lambda_sphere::shooting::{
    bisect_b0, bracket_scan, close_profile, default_b_min, shoot, Bisection, ScanResult, Terminal,
};
use lambda_sphere::verify::{
    check_b0, check_self_intersections, check_special_solutions, verify_shot, CheckResult, IntersectionReport,
    VerificationReport,
};
use lambda_sphere::{ClosedProfile64, Params64, ShotClass, ShotReport64};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::artifacts::Artifacts;
use crate::config::{Command, Format, RunConfig, SWEEP_B_MAX, SWEEP_B_MIN};
use crate::error::CliError;

/// Arc-length spacing of exported profiles and of the self-intersection test.
pub const PROFILE_H: f64 = 0.01;
/// Arc-length spacing of the profile rings of the mesh.
pub const MESH_H: f64 = 0.05;
/// Samples per branch for the shape checks before refinement.
pub const CHECK_SAMPLES: usize = 1000;
/// Residual bound for the exact solutions.
pub const SPECIAL_TOL: f64 = 1e-10;
/// Radial deviation bound for the integrated circle.
pub const REINTEGRATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    ChecksFailed,
    Anomaly,
}

#[derive(Debug)]
pub struct Outcome {
    pub status: Status,
    pub lines: Vec<String>,
    pub artifacts: Artifacts,
}

impl Outcome {
    fn from_report(report: &VerificationReport, mut lines: Vec<String>, artifacts: Artifacts) -> Outcome {
        let t = report.tally();
        for r in report.failures() {
            lines.push(format!("FAIL {} at b = {}: {}", r.check_id, r.params.b, r.details));
        }
        lines.push(format!("checks: {} passed, {} failed, {} skipped", t.passed, t.failed, t.skipped));
        let status = if report.all_passed() { Status::Ok } else { Status::ChecksFailed };
        Outcome { status, lines, artifacts }
    }
}

#[derive(Debug, Clone, Serialize)]
struct EventSummary {
    s: f64,
    x: f64,
    z: f64,
    theta: f64,
}

impl From<&Event<f64>> for EventSummary {
    fn from(e: &Event<f64>) -> Self {
        EventSummary { s: e.s, x: e.state.x, z: e.state.z, theta: e.state.theta() }
    }
}

#[derive(Debug, Clone, Serialize)]
struct ShotSummary {
    b: f64,
    class: ShotClass,
    residual: Option<f64>,
    in_regime: bool,
    terminal: Terminal<f64>,
    s1: Option<EventSummary>,
    sm: Option<EventSummary>,
    s2: Option<EventSummary>,
    z0: Option<EventSummary>,
    first_steps: usize,
    second_steps: Option<usize>,
}

impl From<&ShotReport64> for ShotSummary {
    fn from(r: &ShotReport64) -> Self {
        ShotSummary {
            b: r.b,
            class: r.class(),
            residual: r.residual(),
            in_regime: r.in_regime,
            terminal: r.terminal.clone(),
            s1: r.s1.as_ref().map(Into::into),
            sm: r.sm.as_ref().map(Into::into),
            s2: r.s2.as_ref().map(Into::into),
            z0: r.z0.as_ref().map(Into::into),
            first_steps: r.first.step_count(),
            second_steps: r.second.as_ref().map(|b| b.step_count()),
        }
    }
}

pub fn run(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let p = cfg.params()?;
    let mut out = match cfg.command {
        Command::Special => special(cfg, &p),
        Command::Trace => single_shot(cfg, &p, true),
        Command::Shoot => single_shot(cfg, &p, false),
        Command::FindB0 => find_b0(cfg, &p, false),
        Command::Mesh => find_b0(cfg, &p, true),
        Command::Verify => sweep(cfg, &p),
    }?;
    out.artifacts.add("config.toml", "config", cfg.to_toml());
    Ok(out)
}

fn params_json(p: &Params64) -> serde_json::Value {
    serde_json::to_value(p).expect("params serialize")
}

fn special(cfg: &RunConfig, p: &Params64) -> Result<Outcome, CliError> {
    let report = VerificationReport::new(check_special_solutions(p, CHECK_SAMPLES, SPECIAL_TOL, REINTEGRATION_TOL));
    let lines = report
        .records
        .iter()
        .map(|r| format!("{:<30} {:?} {}", r.check_id, r.status, r.details))
        .collect();
    let mut art = Artifacts::default();
    if cfg.wants(Format::Json) {
        let doc = json!({ "command": "special", "params": params_json(p), "tally": report.tally(), "checks": report });
        art.add("report.json", "report", report_json(&doc)?);
    }
    Ok(Outcome::from_report(&report, lines, art))
}

fn shot_markers(shot: &ShotReport64) -> Vec<SvgMarker> {
    let mark = |label: &str, class, e: &Option<Event<f64>>| {
        e.as_ref().map(|e| SvgMarker { label: format!("{label} s={:.6}", e.s), x: e.state.x, z: e.state.z, class })
    };
    [mark("s1", "s1", &shot.s1), mark("s_m", "sm", &shot.sm), mark("s2", "s2", &shot.s2), mark("z0", "z0", &shot.z0)]
        .into_iter()
        .flatten()
        .collect()
}

fn sampled_path(shot: &ShotReport64) -> Vec<CurveState<f64>> {
    let mut pts = Vec::new();
    for br in std::iter::once(&shot.first).chain(shot.second.as_ref()) {
        let count = ((br.length() / PROFILE_H).ceil() as usize).max(2);
        pts.extend(br.sample(count));
    }
    pts
}

fn single_shot(cfg: &RunConfig, p: &Params64, trace: bool) -> Result<Outcome, CliError> {
    let b = cfg.b.expect("validated");
    let shot = shoot(b, p)?;
    let summary = ShotSummary::from(&shot);
    let exploring = b > p.sphere_radius();
    let mut lines = vec![format!("b = {b}: {:?}", shot.class())];
    if let Some(f) = shot.residual() {
        lines.push(format!("x(s2) = {f:e}"));
    }
    if let Some(reason) = shot.anomaly() {
        lines.push(format!("anomaly: {reason}"));
    }
    if let Some(reason) = shot.irregularity() {
        lines.push(format!("outside b > -(4n+1) lambda: {reason}"));
    }
    if exploring {
        lines.push(format!("b is above the sphere radius {}; recorded for exploration", p.sphere_radius()));
    }
    let mut art = Artifacts::default();
    if trace {
        let pts = sampled_path(&shot);
        if cfg.wants(Format::Csv) {
            art.add("trace.csv", "trace-csv", profile_csv(&pts));
        }
        if cfg.wants(Format::Svg) {
            art.add("trace.svg", "trace-svg", profile_svg(&pts, &shot_markers(&shot)));
        }
    }
    if cfg.wants(Format::Json) {
        let doc = json!({
            "command": cfg.command.name(),
            "params": params_json(p),
            "exploration": exploring,
            "shot": summary,
        });
        art.add("shot.json", "shot", report_json(&doc)?);
    }
    let status = if shot.class() == ShotClass::Anomalous && !exploring { Status::Anomaly } else { Status::Ok };
    Ok(Outcome { status, lines, artifacts: art })
}

struct Pipeline {
    scan: ScanResult<f64>,
    bisection: Bisection<f64>,
    profile: ClosedProfile64,
}

fn pipeline(cfg: &RunConfig, p: &Params64) -> Result<Pipeline, CliError> {
    let b_min = cfg.b_min.unwrap_or_else(|| default_b_min(p));
    let b_max = cfg.b_max.unwrap_or_else(|| p.sphere_radius());
    let scan = bracket_scan(p, b_min, b_max, cfg.grid)?;
    let bisection = bisect_b0(scan.bracket, p, cfg.tol_b, cfg.tol_f)?;
    let profile = close_profile(&bisection.report, p, cfg.tol_f)?;
    Ok(Pipeline { scan, bisection, profile })
}

fn profile_markers(profile: &ClosedProfile64, shot: &ShotReport64, crossings: &IntersectionReport) -> Vec<SvgMarker> {
    let mut m = Vec::new();
    let mut pair = |label: &str, class, e: &Option<Event<f64>>| {
        if let Some(e) = e {
            m.push(SvgMarker { label: label.to_string(), x: e.state.x, z: e.state.z, class });
            m.push(SvgMarker { label: format!("{label} (mirror)"), x: -e.state.x, z: e.state.z, class });
        }
    };
    pair("s1", "s1", &shot.s1);
    pair("s_m", "sm", &shot.sm);
    m.push(SvgMarker { label: "s2".into(), x: 0.0, z: profile.junction.z, class: "s2" });
    for c in crossings.points.iter().chain(&crossings.axis_points) {
        m.push(SvgMarker {
            label: format!("crossing angle {:.4}", c.angle),
            x: c.x,
            z: c.z,
            class: "crossing",
        });
    }
    m
}

fn find_b0(cfg: &RunConfig, p: &Params64, mesh_only: bool) -> Result<Outcome, CliError> {
    let Pipeline { scan, bisection, profile } = pipeline(cfg, p)?;
    let shot = &bisection.report;
    let mut records: Vec<CheckResult> = check_b0(&profile, p, cfg.tol_f);
    let (cross_checks, crossings) = check_self_intersections(&profile, PROFILE_H)?;
    records.extend(cross_checks);
    if !mesh_only {
        records.extend(verify_shot(shot, p, CHECK_SAMPLES));
    }
    let report = VerificationReport::new(records);

    let mut lines = vec![
        format!("b0 = {:.15}", bisection.b0),
        format!("x(s2) = {:e}, z(s2) = {}", profile.x_junction_raw, profile.junction.z),
        format!("{} bisection shots, {} self-crossings off the axis", bisection.history.len(), crossings.count),
    ];
    if scan.flips.len() > 1 {
        lines.push(format!("{} class changes on the scan grid; bisected the lowest", scan.flips.len()));
    }

    let pts = resample_arclength(&profile, PROFILE_H);
    let mut art = Artifacts::default();
    if cfg.wants(Format::Csv) {
        art.add("profile.csv", "profile-csv", profile_csv(&pts));
    }
    if cfg.wants(Format::Svg) {
        art.add("profile.svg", "profile-svg", profile_svg(&pts, &profile_markers(&profile, shot, &crossings)));
    }
    let mut mesh_info = serde_json::Value::Null;
    if cfg.wants(Format::Obj) {
        let rings = resample_arclength(&profile, MESH_H);
        let mesh = revolve(&rings, cfg.segments, p.n, p.lambda)?;
        mesh_info = json!({
            "meta": mesh.meta,
            "vertices": mesh.vertices.len(),
            "faces": mesh.faces.len(),
            "watertight": mesh.is_watertight(),
            "euler_characteristic": mesh.euler_characteristic(),
        });
        lines.push(format!(
            "mesh: {} vertices, {} faces, euler characteristic {}",
            mesh.vertices.len(),
            mesh.faces.len(),
            mesh.euler_characteristic()
        ));
        art.add("mesh.obj", "mesh-obj", mesh_obj(&mesh));
    }
    if cfg.wants(Format::Json) {
        let doc = json!({
            "command": cfg.command.name(),
            "params": params_json(p),
            "scan": { "bracket": scan.bracket, "flips": scan.flips, "samples": scan.samples },
            "bisection": {
                "b0": bisection.b0,
                "residual": shot.residual(),
                "final_bracket": bisection.final_bracket,
                "history": bisection.history,
            },
            "shot": ShotSummary::from(shot),
            "profile": {
                "b0": profile.b0,
                "half_length": profile.half_length,
                "z_junction": profile.junction.z,
                "x_junction_raw": profile.x_junction_raw,
                "total_turning": profile.total_turning(),
                "samples": pts.len(),
                "spacing": PROFILE_H,
            },
            "intersections": crossings,
            "mesh": mesh_info,
            "tally": report.tally(),
            "checks": report,
        });
        art.add("report.json", "report", report_json(&doc)?);
    }
    Ok(Outcome::from_report(&report, lines, art))
}

/// Geometric grid of `count` heights over `[lo, hi]`, both included.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let r = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| if i + 1 == count { hi } else { lo * (r * i as f64).exp() }).collect()
}

fn sweep(cfg: &RunConfig, p: &Params64) -> Result<Outcome, CliError> {
    let bs = match cfg.b {
        Some(b) => vec![b],
        None => {
            let lo = cfg.b_min.unwrap_or(SWEEP_B_MIN);
            let hi = cfg.b_max.unwrap_or(SWEEP_B_MAX);
            if lo >= hi {
                return Err(CliError::Usage(format!("sweep range [{lo}, {hi}] is empty")));
            }
            geometric_grid(lo, hi, cfg.grid)
        }
    };
    let per_b: Vec<(f64, ShotClass, Vec<CheckResult>)> = bs
        .par_iter()
        .map(|&b| {
            let shot = shoot(b, p)?;
            Ok((b, shot.class(), verify_shot(&shot, p, CHECK_SAMPLES)))
        })
        .collect::<Result<_, CliError>>()?;
    let classes: Vec<_> = per_b.iter().map(|(b, c, _)| json!({ "b": b, "class": c })).collect();
    let mut lines: Vec<String> = per_b.iter().map(|(b, c, _)| format!("b = {b:.6e}: {c:?}")).collect();
    let anomalous = per_b.iter().filter(|(_, c, _)| *c == ShotClass::Anomalous).count();
    let irregular = per_b.iter().filter(|(_, c, _)| *c == ShotClass::Irregular).count();
    let report = VerificationReport::new(per_b.into_iter().flat_map(|(_, _, r)| r).collect());
    let mut art = Artifacts::default();
    if cfg.wants(Format::Json) {
        let doc = json!({
            "command": "verify",
            "params": params_json(p),
            "shots": classes,
            "tally": report.tally(),
            "checks": report,
        });
        art.add("report.json", "report", report_json(&doc)?);
    }
    if anomalous > 0 {
        lines.push(format!("{anomalous} anomalous shots"));
    }
    if irregular > 0 {
        lines.push(format!("{irregular} irregular shots outside b > -(4n+1) lambda"));
    }
    let mut out = Outcome::from_report(&report, lines, art);
    if anomalous > 0 && out.status == Status::Ok {
        out.status = Status::Anomaly;
    }
    Ok(out)
}

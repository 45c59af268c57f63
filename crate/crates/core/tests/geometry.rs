use lambda_sphere::geometry::{
    mesh_obj, parse_obj, parse_profile_csv, profile_csv, profile_svg, resample_arclength, revolve, write_atomic,
    MeshError, SvgMarker,
};
use lambda_sphere::shooting::{bisect_b0, bracket_scan, close_profile, default_b_min};
use lambda_sphere::{ClosedProfile64, Params64};

fn sphere() -> (Params64, ClosedProfile64) {
    let p = Params64::new(2, 0.0).unwrap();
    let prof = ClosedProfile64::sphere(&p);
    (p, prof)
}

fn b0_profile() -> ClosedProfile64 {
    let p = Params64::new(2, 0.0).unwrap();
    let scan = bracket_scan(&p, default_b_min(&p), p.sphere_radius(), 32).unwrap();
    let bis = bisect_b0(scan.bracket, &p, 1e-12, 1e-9).unwrap();
    close_profile(&bis.report, &p, 1e-9).unwrap()
}

#[test]
fn circle_resampling_stays_on_the_circle() {
    let (_, prof) = sphere();
    let pts = resample_arclength(&prof, 0.01);
    // the profile is the upper half circle, length pi sqrt(2)
    let expected = (std::f64::consts::PI * 2f64.sqrt() / 2.0 / 0.01).ceil() as usize * 2 + 1;
    assert_eq!(pts.len(), expected);
    let dev = pts.iter().map(|s| (s.x.hypot(s.z) - 2f64.sqrt()).abs()).fold(0.0, f64::max);
    assert!(dev <= 1e-8, "{dev:e}");
    assert!(pts.windows(2).all(|w| (w[1].s - w[0].s) <= 0.01 + 1e-15));
    assert_eq!((pts[0].x, pts[0].z), (2f64.sqrt(), 0.0));
    let last = pts.last().unwrap();
    assert!((last.x + 2f64.sqrt()).abs() < 1e-15 && last.z.abs() < 1e-15);
}

#[test]
fn coarse_resampling_keeps_the_anchors() {
    let prof = b0_profile();
    let pts = resample_arclength(&prof, 100.0);
    assert_eq!(pts.len(), prof.anchors().len());
    assert_eq!(pts.len(), 5);
    assert!((pts[0].x - prof.b0).abs() < 1e-15 && pts[0].z.abs() < 1e-15);
    assert!(pts[2].x == 0.0 && (pts[2].z - prof.junction.z).abs() < 1e-15);
    assert!((pts[4].x + prof.b0).abs() < 1e-15);
}

#[test]
fn refined_resampling_interleaves() {
    let prof = b0_profile();
    let coarse = resample_arclength(&prof, 0.02);
    let fine = resample_arclength(&prof, 0.01);
    // every coarse point is a fine point
    for c in &coarse {
        let d = fine.iter().map(|f| (f.x - c.x).hypot(f.z - c.z)).fold(f64::INFINITY, f64::min);
        assert!(d <= 1e-8, "{d:e} at s = {}", c.s);
    }
}

#[test]
fn closed_profile_is_mirror_symmetric() {
    let prof = b0_profile();
    let total = prof.total_length();
    for i in 0..=200 {
        let u = total * f64::from(i) / 200.0;
        let (a, b) = (prof.eval(u), prof.eval(total - u));
        assert!((a.x + b.x).abs() <= 1e-9 && (a.z - b.z).abs() <= 1e-9, "u = {u}");
    }
}

#[test]
fn circle_csv_recomputes_radius() {
    let (_, prof) = sphere();
    let csv = profile_csv(&resample_arclength(&prof, 0.01));
    let rows = parse_profile_csv(&csv).unwrap();
    assert!(rows.len() > 400);
    for r in rows {
        assert!((r[1] * r[1] + r[2] * r[2] - 2.0).abs() <= 1e-15, "{r:?}");
    }
}

#[test]
fn csv_rejects_bad_input() {
    assert!(parse_profile_csv("x,z\n1,2\n").is_err());
    assert!(parse_profile_csv("s,x,z,theta\n1,2,3\n").is_err());
    assert!(parse_profile_csv("s,x,z,theta\n1,2,3,nope\n").is_err());
}

#[test]
fn sphere_mesh_is_round_watertight_and_outward() {
    let (p, prof) = sphere();
    let pts = resample_arclength(&prof, 0.05);
    let mesh = revolve(&pts, 64, 2, p.lambda).unwrap();
    for v in &mesh.vertices {
        let r = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        assert!((r - 2f64.sqrt()).abs() <= 1e-6);
    }
    assert!(mesh.is_watertight());
    assert_eq!(mesh.euler_characteristic(), 2);
    assert!(mesh.signed_volume() > 0.0);
    let ball = 4.0 / 3.0 * std::f64::consts::PI * 2f64.powf(1.5);
    assert!((mesh.signed_volume() / ball - 1.0).abs() < 1e-2);
}

#[test]
fn three_segments_still_close() {
    let (p, prof) = sphere();
    let mesh = revolve(&resample_arclength(&prof, 0.2), 3, 2, p.lambda).unwrap();
    assert!(mesh.is_watertight());
    assert_eq!(mesh.euler_characteristic(), 2);
    assert!(matches!(revolve(&resample_arclength(&prof, 0.2), 2, 2, p.lambda), Err(MeshError::TooFewSegments(2))));
}

#[test]
fn b0_mesh_is_closed_and_symmetric() {
    let prof = b0_profile();
    let pts = resample_arclength(&prof, 0.05);
    let mesh = revolve(&pts, 128, 2, 0.0).unwrap();
    assert!(mesh.is_watertight());
    assert_eq!(mesh.euler_characteristic(), 2);
    let mut keyed: Vec<[i64; 3]> =
        mesh.vertices.iter().map(|v| [(v[0] * 1e9).round() as i64, (v[1] * 1e9).round() as i64, (v[2] * 1e9).round() as i64]).collect();
    let mut mirrored: Vec<[i64; 3]> = keyed.iter().map(|k| [-k[0], k[1], k[2]]).collect();
    keyed.sort();
    mirrored.sort();
    let off = keyed.iter().zip(&mirrored).filter(|(a, b)| a.iter().zip(b.iter()).any(|(x, y)| (x - y).abs() > 1)).count();
    assert_eq!(off, 0);
}

#[test]
fn interior_axis_point_is_rejected() {
    let (p, prof) = sphere();
    let mut pts = resample_arclength(&prof, 0.1);
    pts[5].z = 0.0;
    assert!(matches!(revolve(&pts, 8, 2, p.lambda), Err(MeshError::NonPositiveHeight { index: 5, .. })));
}

#[test]
fn obj_round_trip_is_bitwise() {
    let prof = b0_profile();
    let mesh = revolve(&resample_arclength(&prof, 0.1), 16, 2, 0.0).unwrap();
    let (v, f) = parse_obj(&mesh_obj(&mesh)).unwrap();
    assert_eq!(f, mesh.faces);
    assert_eq!(v.len(), mesh.vertices.len());
    for (a, b) in v.iter().zip(&mesh.vertices) {
        assert!(a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()));
    }
    assert!(parse_obj("v 1 2\n").is_err());
    assert!(parse_obj("v 1 2 3\nf 1 2 4\n").is_err());
}

#[test]
fn svg_has_viewbox_axes_and_markers() {
    let (_, prof) = sphere();
    let pts = resample_arclength(&prof, 0.05);
    let svg = profile_svg(&pts, &[SvgMarker { label: "s1".into(), x: 0.0, z: 2f64.sqrt(), class: "s1" }]);
    assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
    assert!(svg.contains("viewBox=") && svg.contains("<polyline") && svg.contains("<title>s1</title>"));
    assert_eq!(svg.matches("<line").count(), 2);
}

#[test]
fn atomic_write_replaces_whole_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.txt");
    write_atomic(&path, b"first").unwrap();
    write_atomic(&path, b"second").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"second");
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert!(write_atomic(&dir.path().join("missing/a.txt"), b"x").is_err());
}

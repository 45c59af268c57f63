use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use super::RevolutionMesh;
use crate::ode::CurveState;
use crate::Real;

#[derive(Debug, Error)]
pub enum ExportError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `s,x,z,theta` with 17 significant digits per value.
pub fn profile_csv<T: Real>(points: &[CurveState<T>]) -> String {
    let mut out = String::from("s,x,z,theta\n");
    for st in points {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", st.s, st.x, st.z, st.theta());
    }
    out
}

/// Rows `[s, x, z, theta]` of a profile CSV.
pub fn parse_profile_csv(text: &str) -> Result<Vec<[f64; 4]>, ExportError> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "s,x,z,theta")) => {}
        other => {
            return Err(ExportError::Parse {
                line: 1,
                message: format!("expected header s,x,z,theta, got {:?}", other.map(|(_, l)| l)),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let vals: Result<Vec<f64>, _> = l.split(',').map(|v| v.trim().parse::<f64>()).collect();
            match vals {
                Ok(v) if v.len() == 4 => Ok([v[0], v[1], v[2], v[3]]),
                Ok(v) => Err(ExportError::Parse { line: i + 1, message: format!("expected 4 columns, got {}", v.len()) }),
                Err(e) => Err(ExportError::Parse { line: i + 1, message: e.to_string() }),
            }
        })
        .collect()
}

/// Wavefront OBJ with `v` and `f` records only; face indices are 1-based.
/// Coordinates use the shortest representation that parses back to the
/// same value.
pub fn mesh_obj<T: Real>(mesh: &RevolutionMesh<T>) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 48 + mesh.faces.len() * 24);
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v[0], v[1], v[2]);
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1);
    }
    out
}

/// Vertices and zero-based faces of an OBJ document written by [`mesh_obj`].
#[allow(clippy::type_complexity)]
pub fn parse_obj(text: &str) -> Result<(Vec<[f64; 3]>, Vec<[usize; 3]>), ExportError> {
    let mut verts = Vec::new();
    let mut faces = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let err = |message: String| ExportError::Parse { line: i + 1, message };
        let mut parts = line.split_whitespace();
        match parts.next() {
            None => {}
            Some("v") => {
                let v: Result<Vec<f64>, _> = parts.map(str::parse::<f64>).collect();
                match v.map_err(|e| err(e.to_string()))?.as_slice() {
                    &[x, y, z] => verts.push([x, y, z]),
                    other => return Err(err(format!("vertex with {} coordinates", other.len()))),
                }
            }
            Some("f") => {
                let f: Result<Vec<usize>, _> = parts.map(str::parse::<usize>).collect();
                match f.map_err(|e| err(e.to_string()))?.as_slice() {
                    &[a, b, c] if a > 0 && b > 0 && c > 0 => faces.push([a - 1, b - 1, c - 1]),
                    _ => return Err(err("face must have three positive indices".into())),
                }
            }
            Some(tag) => return Err(err(format!("unsupported record {tag:?}"))),
        }
    }
    if let Some(bad) = faces.iter().flatten().find(|&&k| k >= verts.len()) {
        return Err(ExportError::Parse { line: 0, message: format!("face index {} out of range", bad + 1) });
    }
    Ok((verts, faces))
}

/// A labelled point drawn on the profile plot.
#[derive(Debug, Clone, PartialEq)]
pub struct SvgMarker {
    pub label: String,
    pub x: f64,
    pub z: f64,
    pub class: &'static str,
}

/// Plot of the profile polyline in the `(x, z)` plane with both axes and
/// the given markers. The view box is the bounding box of the curve and
/// markers grown by 5% on each side; `z` points up.
pub fn profile_svg<T: Real>(points: &[CurveState<T>], markers: &[SvgMarker]) -> String {
    let xs = points.iter().map(|p| p.x.f64()).chain(markers.iter().map(|m| m.x));
    let zs = points.iter().map(|p| p.z.f64()).chain(markers.iter().map(|m| m.z));
    let (x0, x1) = xs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (z0, z1) = zs.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let (w, h) = ((x1 - x0).max(1e-9), (z1 - z0).max(1e-9));
    let (mx, mz) = (0.05 * w, 0.05 * h);
    let (vx, vy, vw, vh) = (x0 - mx, -(z1 + mz), w + 2.0 * mx, h + 2.0 * mz);
    let stroke = 0.004 * vw.max(vh);

    let mut out = String::new();
    let _ = writeln!(out, r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{vx} {vy} {vw} {vh}">"#);
    let _ = writeln!(
        out,
        r#"<g stroke="gray" stroke-width="{}"><line x1="{}" y1="0" x2="{}" y2="0"/><line x1="0" y1="{}" x2="0" y2="{}"/></g>"#,
        stroke / 2.0,
        vx,
        vx + vw,
        vy,
        vy + vh
    );
    out.push_str(r#"<polyline fill="none" stroke="black" stroke-width=""#);
    let _ = write!(out, "{stroke}\" points=\"");
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{},{}", p.x.f64(), -p.z.f64());
    }
    out.push_str("\"/>\n");
    for m in markers {
        let _ = writeln!(
            out,
            r#"<circle class="{}" cx="{}" cy="{}" r="{}"><title>{}</title></circle>"#,
            m.class,
            m.x,
            -m.z,
            3.0 * stroke,
            m.label
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Pretty-printed JSON of any report value.
pub fn report_json<S: Serialize + ?Sized>(value: &S) -> Result<String, ExportError> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Writes `bytes` to a temporary file beside `path` and renames it into
/// place, so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ExportError> {
    let io = |source| ExportError::Io { path: path.to_path_buf(), source };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644)).map_err(io)?;
    }
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

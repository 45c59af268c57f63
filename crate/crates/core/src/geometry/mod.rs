//! Resampling, surfaces of revolution and file formats.

mod export;
mod mesh;

pub use export::{
    parse_obj, parse_profile_csv, profile_csv, profile_svg, mesh_obj, report_json, write_atomic, ExportError,
    SvgMarker,
};
pub use mesh::{revolve, MeshError, MeshMeta, RevolutionMesh};

use crate::ode::CurveState;
use crate::shooting::ClosedProfile;
use crate::Real;

/// Points along the closed profile at arc-length spacing at most `h`,
/// evaluated from the dense representation. Every anchor of
/// [`ClosedProfile::anchors`] is included exactly; between anchors the
/// spacing is uniform.
pub fn resample_arclength<T: Real>(profile: &ClosedProfile<T>, h: T) -> Vec<CurveState<T>> {
    assert!(h > T::zero() && h.is_finite(), "resampling step must be positive");
    let anchors = profile.anchors();
    let mut out = Vec::new();
    for w in anchors.windows(2) {
        let (a, b) = (w[0], w[1]);
        let m = ((b - a) / h).ceil().to_usize().unwrap_or(1).max(1);
        let mf = T::from_usize(m).expect("segment count");
        for k in 0..m {
            let u = if k == 0 { a } else { a + (b - a) * T::from_usize(k).expect("index") / mf };
            out.push(profile.eval(u));
        }
    }
    if let Some(&last) = anchors.last() {
        out.push(profile.eval(last));
    }
    out
}

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ode::CurveState;
use crate::Real;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("profile sample {index} has non-positive height z = {z}")]
    NonPositiveHeight { index: usize, z: f64 },
    #[error("need at least 3 angular segments, got {0}")]
    TooFewSegments(usize),
    #[error("need at least 3 profile samples, got {0}")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshMeta {
    pub n: u32,
    pub lambda: f64,
    pub b0: f64,
    pub profile_samples: usize,
    pub segments: usize,
}

/// Triangulated surface of revolution about the x-axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RevolutionMesh<T> {
    pub vertices: Vec<[T; 3]>,
    pub faces: Vec<[usize; 3]>,
    pub meta: MeshMeta,
}

/// Rotates a profile running from one axis point to the other about the
/// x-axis.
///
/// The first and last samples become single pole vertices with triangle
/// fans; every interior sample becomes a ring of `segments` vertices
/// `(x, z cos phi, z sin phi)`. Faces are wound so that the round sphere
/// has outward normals. Self-intersections of the profile are kept.
pub fn revolve<T: Real>(
    profile: &[CurveState<T>],
    segments: usize,
    n: u32,
    lambda: T,
) -> Result<RevolutionMesh<T>, MeshError> {
    if segments < 3 {
        return Err(MeshError::TooFewSegments(segments));
    }
    if profile.len() < 3 {
        return Err(MeshError::TooFewSamples(profile.len()));
    }
    let interior = &profile[1..profile.len() - 1];
    if let Some((i, st)) = interior.iter().enumerate().find(|(_, st)| !(st.z > T::zero())) {
        return Err(MeshError::NonPositiveHeight { index: i + 1, z: st.z.f64() });
    }
    let rings = interior.len();
    let first = profile[0];
    let last = profile[profile.len() - 1];

    let mut vertices = Vec::with_capacity(rings * segments + 2);
    vertices.push([first.x, T::zero(), T::zero()]);
    let step = T::two() * T::PI() / T::from_usize(segments).expect("segments");
    let trig: Vec<(T, T)> = (0..segments)
        .map(|j| {
            let (s, c) = (step * T::from_usize(j).expect("index")).sin_cos();
            (c, s)
        })
        .collect();
    for st in interior {
        for &(c, s) in &trig {
            vertices.push([st.x, st.z * c, st.z * s]);
        }
    }
    vertices.push([last.x, T::zero(), T::zero()]);

    let pole_a = 0;
    let pole_b = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + i * segments + (j % segments);
    let mut faces = Vec::with_capacity(2 * segments * rings);
    for j in 0..segments {
        faces.push([pole_a, ring(0, j), ring(0, j + 1)]);
    }
    for i in 0..rings - 1 {
        for j in 0..segments {
            faces.push([ring(i, j), ring(i + 1, j), ring(i, j + 1)]);
            faces.push([ring(i + 1, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    for j in 0..segments {
        faces.push([ring(rings - 1, j), pole_b, ring(rings - 1, j + 1)]);
    }

    Ok(RevolutionMesh {
        vertices,
        faces,
        meta: MeshMeta { n, lambda: lambda.f64(), b0: first.x.f64(), profile_samples: profile.len(), segments },
    })
}

impl<T: Real> RevolutionMesh<T> {
    /// Undirected edges with the number of faces using each.
    pub fn edge_counts(&self) -> std::collections::HashMap<(usize, usize), usize> {
        let mut m = std::collections::HashMap::new();
        for f in &self.faces {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                *m.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        m
    }

    /// Every edge is shared by exactly two faces, traversed in opposite
    /// directions.
    pub fn is_watertight(&self) -> bool {
        let mut directed = std::collections::HashSet::new();
        for f in &self.faces {
            for k in 0..3 {
                if !directed.insert((f[k], f[(k + 1) % 3])) {
                    return false;
                }
            }
        }
        directed.iter().all(|&(a, b)| directed.contains(&(b, a)))
    }

    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let e = self.edge_counts().len() as i64;
        let f = self.faces.len() as i64;
        v - e + f
    }

    /// Signed volume enclosed by the faces; positive for outward winding of
    /// an embedded surface.
    pub fn signed_volume(&self) -> T {
        let six = T::of(6.0);
        self.faces.iter().fold(T::zero(), |acc, f| {
            let [a, b, c] = [self.vertices[f[0]], self.vertices[f[1]], self.vertices[f[2]]];
            let det = a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
                + a[2] * (b[0] * c[1] - b[1] * c[0]);
            acc + det / six
        })
    }
}

use serde::{Deserialize, Serialize};

use super::voxel::Aabb;
use crate::{Error, Result, Vec3};

/// Indexed triangle mesh. Closed meshes are expected to be consistently
/// oriented; containment uses the non-zero winding rule so overlapping closed
/// parts behave as their union.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriangleMesh {
    vertices: Vec<Vec3>,
    triangles: Vec<[usize; 3]>,
}

impl TriangleMesh {
    /// Validates indices and drops degenerate (zero-area or repeated-index) triangles.
    pub fn new(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Result<Self> {
        if let Some(bad) = triangles.iter().flatten().find(|&&i| i >= vertices.len()) {
            return Err(Error::Domain(format!(
                "triangle index {bad} out of range for {} vertices",
                vertices.len()
            )));
        }
        if let Some(v) = vertices.iter().find(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite(format!("mesh vertex {v:?}")));
        }
        let total = triangles.len();
        let mut mesh = Self { vertices, triangles };
        let eps = {
            let diag = mesh.bounding_box().map(|b| b.diagonal()).unwrap_or(0.0);
            1e-14 * diag * diag
        };
        mesh.triangles.retain(|t| {
            t[0] != t[1] && t[1] != t[2] && t[0] != t[2] && {
                let [a, b, c] = t.map(|i| mesh.vertices[i]);
                (b - a).cross(&(c - a)).norm() > eps
            }
        });
        if mesh.triangles.len() != total {
            log::debug!("dropped {} degenerate triangles", total - mesh.triangles.len());
        }
        Ok(mesh)
    }

    /// Trusted construction without validation or cleanup.
    pub(crate) fn from_raw(vertices: Vec<Vec3>, triangles: Vec<[usize; 3]>) -> Self {
        Self { vertices, triangles }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn corners(&self, t: usize) -> [Vec3; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn surface_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    /// Signed enclosed volume by the divergence theorem; positive for outward orientation.
    pub fn volume(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let [a, b, c] = t.map(|i| self.vertices[i]);
                a.dot(&b.cross(&c))
            })
            .sum::<f64>()
            / 6.0
    }

    pub fn bounding_box(&self) -> Option<Aabb> {
        Aabb::from_points(self.vertices.iter())
    }

    pub fn map_vertices(&self, f: impl Fn(&Vec3) -> Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(f).collect(),
            triangles: self.triangles.clone(),
        }
    }

    /// Appends `other`'s triangles, reindexing its vertices.
    pub fn merge(&mut self, other: &TriangleMesh) {
        let offset = self.vertices.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles.extend(other.triangles.iter().map(|t| t.map(|i| i + offset)));
    }

    /// Where a ray parallel to +x through `(y, z)` crosses triangle `t`.
    ///
    /// Returns the crossing abscissa and `+1` when the ray leaves through the
    /// face (normal has positive x) or `-1` when it enters. Points on shared
    /// edges and vertices are assigned to exactly one triangle by a top-left
    /// rule on canonically ordered edges, so closed meshes never double-count.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn x_ray_crossing(&self, t: usize, y: f64, z: f64) -> Option<(f64, i32)> {
        let idx = self.triangles[t];
        let v = idx.map(|i| self.vertices[i]);
        let nx = (v[1].y - v[0].y) * (v[2].z - v[0].z) - (v[1].z - v[0].z) * (v[2].y - v[0].y);
        if nx == 0.0 {
            return None;
        }
        let flip = nx < 0.0;
        // e[k] belongs to the edge opposite vertex k
        let mut e = [0.0; 3];
        for k in 0..3 {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let mut value = canonical_edge(&self.vertices, idx[i], idx[j], y, z);
            if flip {
                value = -value;
            }
            if value < 0.0 {
                return None;
            }
            if value == 0.0 {
                let (a, b) = if flip { (v[j], v[i]) } else { (v[i], v[j]) };
                let (dy, dz) = (b.y - a.y, b.z - a.z);
                if !(dz > 0.0 || (dz == 0.0 && dy < 0.0)) {
                    return None;
                }
            }
            e[k] = value;
        }
        let sum = e[0] + e[1] + e[2];
        if sum <= 0.0 {
            return None;
        }
        let x = (e[0] * v[0].x + e[1] * v[1].x + e[2] * v[2].x) / sum;
        Some((x, if flip { -1 } else { 1 }))
    }

    /// Winding number of `p` measured along the +x ray.
    pub fn winding_number(&self, p: &Vec3) -> i32 {
        (0..self.triangles.len())
            .filter_map(|t| self.x_ray_crossing(t, p.y, p.z))
            .filter(|&(x, _)| x >= p.x)
            .map(|(_, s)| s)
            .sum()
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        self.winding_number(p) != 0
    }
}

/// Edge function of `a -> b` at `(y, z)` in the yz-plane, evaluated in index
/// order so both triangles sharing an edge see exactly negated values.
fn canonical_edge(vertices: &[Vec3], a: usize, b: usize, y: f64, z: f64) -> f64 {
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (p, q) = (vertices[lo], vertices[hi]);
    sign * ((q.y - p.y) * (z - p.z) - (q.z - p.z) * (y - p.y))
}

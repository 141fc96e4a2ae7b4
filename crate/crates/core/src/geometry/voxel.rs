use serde::{Deserialize, Serialize};

use super::shape::{Radial, StarConvexShape};
use super::TriangleMesh;
use crate::{Error, Result, Vec3};

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vec3,
    pub max: Vec3,
}

impl Aabb {
    pub fn new(min: Vec3, max: Vec3) -> Self {
        Self { min, max }
    }

    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Option<Self> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        Some(it.fold(Self::new(first, first), |b, p| Self::new(b.min.inf(p), b.max.sup(p))))
    }

    pub fn union(&self, other: &Aabb) -> Self {
        Self::new(self.min.inf(&other.min), self.max.sup(&other.max))
    }

    pub fn expanded(&self, margin: f64) -> Self {
        Self::new(self.min.add_scalar(-margin), self.max.add_scalar(margin))
    }

    pub fn extent(&self) -> Vec3 {
        self.max - self.min
    }

    pub fn diagonal(&self) -> f64 {
        self.extent().norm()
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn contains_box(&self, other: &Aabb) -> bool {
        (0..3).all(|i| self.min[i] <= other.min[i] && other.max[i] <= self.max[i])
    }
}

/// Regular grid of voxel centres over a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoxelGrid {
    bounds: Aabb,
    resolution: [usize; 3],
}

impl VoxelGrid {
    pub fn new(bounds: Aabb, resolution: [usize; 3]) -> Result<Self> {
        if resolution.contains(&0) {
            return Err(Error::Domain("voxel resolution must be at least 1 per axis".into()));
        }
        if !(0..3).all(|i| bounds.max[i] > bounds.min[i]) {
            return Err(Error::Domain("voxel grid box is degenerate".into()));
        }
        Ok(Self { bounds, resolution })
    }

    /// Grid over the union of the shapes' bounds, padded by `padding` times
    /// the union's diagonal, with `resolution` cells per axis.
    pub fn covering(shapes: &[&StarConvexShape], resolution: usize, padding: f64) -> Result<Self> {
        let bounds = shapes
            .iter()
            .map(|s| s.bounding_box())
            .reduce(|a, b| a.union(&b))
            .ok_or_else(|| Error::Domain("no shapes to cover".into()))?;
        let margin = padding * bounds.diagonal();
        Self::new(bounds.expanded(margin), [resolution; 3])
    }

    /// Grid of `cell`-sized boxes on the lattice through `anchor`, just large
    /// enough to cover all the shapes.
    pub fn lattice(shapes: &[&StarConvexShape], anchor: &Vec3, cell: &Vec3) -> Result<Self> {
        if !cell.iter().all(|&c| c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("voxel cell size must be positive, got {cell:?}")));
        }
        let bounds = shapes
            .iter()
            .map(|s| s.bounding_box())
            .reduce(|a, b| a.union(&b))
            .ok_or_else(|| Error::Domain("no shapes to cover".into()))?;
        let lo = (bounds.min - anchor).component_div(cell).map(f64::floor);
        let hi = (bounds.max - anchor).component_div(cell).map(f64::ceil);
        let n = (hi - lo).map(|v| (v as usize).max(1));
        let min = anchor + lo.component_mul(cell);
        let max = min + n.map(|v| v as f64).component_mul(cell);
        Self::new(Aabb::new(min, max), [n.x, n.y, n.z])
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn resolution(&self) -> [usize; 3] {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_size(&self) -> Vec3 {
        let e = self.bounds.extent();
        Vec3::new(
            e.x / self.resolution[0] as f64,
            e.y / self.resolution[1] as f64,
            e.z / self.resolution[2] as f64,
        )
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size().product()
    }

    fn axis_center(&self, axis: usize, i: usize) -> f64 {
        self.bounds.min[axis] + (i as f64 + 0.5) * self.cell_size()[axis]
    }

    pub fn center(&self, i: usize, j: usize, k: usize) -> Vec3 {
        Vec3::new(self.axis_center(0, i), self.axis_center(1, j), self.axis_center(2, k))
    }

    #[inline]
    fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.resolution[1] + j) * self.resolution[0] + i
    }

    /// Which voxel centres lie inside `shape`, in `x`-fastest order.
    pub fn occupancy(&self, shape: &StarConvexShape) -> Vec<bool> {
        match shape.radial_kind() {
            Radial::Mesh(mesh) => self.mesh_occupancy(mesh),
            _ => {
                let [nx, ny, nz] = self.resolution;
                let mut inside = shape.containment();
                let mut out = Vec::with_capacity(self.len());
                for k in 0..nz {
                    for j in 0..ny {
                        for i in 0..nx {
                            out.push(inside(&self.center(i, j, k)));
                        }
                    }
                }
                out
            }
        }
    }

    /// One +x ray per voxel column; each triangle is tested only against the
    /// columns its yz-footprint covers.
    fn mesh_occupancy(&self, mesh: &TriangleMesh) -> Vec<bool> {
        let [nx, ny, nz] = self.resolution;
        let mut columns: Vec<Vec<(f64, i32)>> = vec![Vec::new(); ny * nz];
        let cell = self.cell_size();
        let index_range = |axis: usize, lo: f64, hi: f64, n: usize| {
            let start = ((lo - self.bounds.min[axis]) / cell[axis] - 0.5).floor().max(0.0) as usize;
            let end = (((hi - self.bounds.min[axis]) / cell[axis] - 0.5).ceil().max(-1.0) + 1.0).min(n as f64) as usize;
            start..end.max(start)
        };
        for t in 0..mesh.triangles().len() {
            let [a, b, c] = mesh.corners(t);
            let ys = index_range(1, a.y.min(b.y).min(c.y), a.y.max(b.y).max(c.y), ny);
            let zs = index_range(2, a.z.min(b.z).min(c.z), a.z.max(b.z).max(c.z), nz);
            for k in zs {
                let z = self.axis_center(2, k);
                for j in ys.clone() {
                    if let Some(hit) = mesh.x_ray_crossing(t, self.axis_center(1, j), z) {
                        columns[k * ny + j].push(hit);
                    }
                }
            }
        }
        let mut out = vec![false; self.len()];
        for k in 0..nz {
            for j in 0..ny {
                let hits = &mut columns[k * ny + j];
                if hits.is_empty() {
                    continue;
                }
                hits.sort_by(|p, q| p.0.total_cmp(&q.0));
                // winding at x counts crossings at or beyond x
                let mut winding: i32 = hits.iter().map(|h| h.1).sum();
                let mut next = 0;
                for i in 0..nx {
                    let x = self.axis_center(0, i);
                    while next < hits.len() && hits[next].0 < x {
                        winding -= hits[next].1;
                        next += 1;
                    }
                    out[self.flat(i, j, k)] = winding != 0;
                }
            }
        }
        out
    }
}

/// Intersection over union of two shapes by voxel-centre containment.
///
/// The grid must cover both shapes' bounding boxes.
pub fn iou(a: &StarConvexShape, b: &StarConvexShape, grid: &VoxelGrid) -> Result<f64> {
    let covered = |s: &StarConvexShape| {
        let bb = s.bounding_box();
        let tol = 1e-9 * grid.bounds.diagonal();
        grid.bounds.expanded(tol).contains_box(&bb)
    };
    if !covered(a) || !covered(b) {
        return Err(Error::GridTooSmall);
    }
    let (oa, ob) = (grid.occupancy(a), grid.occupancy(b));
    let (mut inter, mut union) = (0u64, 0u64);
    for (x, y) in oa.iter().zip(&ob) {
        inter += (*x && *y) as u64;
        union += (*x || *y) as u64;
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

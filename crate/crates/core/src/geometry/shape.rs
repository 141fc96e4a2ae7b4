use crate::geometry::{tessellate, Aabb, TriangleMesh};
use crate::sh::{BasisEvaluator, Rotation3, ShCoefficients, SphericalDirection};
use crate::{Error, Result, Vec3};

/// Distance from the centre of an axis-aligned box to its surface along `u`.
///
/// `u` need not be normalized; components that are exactly zero are skipped.
pub fn cuboid_radial(half_extents: &Vec3, u: &Vec3) -> f64 {
    let u = u.normalize();
    (0..3)
        .filter(|&i| u[i] != 0.0)
        .map(|i| half_extents[i] / u[i].abs())
        .fold(f64::INFINITY, f64::min)
}

/// How the boundary distance is described.
#[derive(Debug, Clone)]
pub enum Radial {
    /// Spherical-harmonics series around the star point, clamped at zero.
    Series(ShCoefficients),
    Sphere {
        radius: f64,
    },
    /// Box centred on the star point; `orientation` maps body axes to world axes.
    Cuboid {
        half_extents: Vec3,
        orientation: Rotation3,
    },
    /// Closed mesh in world coordinates.
    Mesh(TriangleMesh),
}

/// A star-convex set: every boundary point is visible from the star point.
#[derive(Debug, Clone)]
pub struct StarConvexShape {
    star_point: Vec3,
    radial: Radial,
}

impl StarConvexShape {
    pub fn series(star_point: Vec3, coeffs: ShCoefficients) -> Self {
        Self {
            star_point,
            radial: Radial::Series(coeffs),
        }
    }

    pub fn sphere(center: Vec3, radius: f64) -> Result<Self> {
        if radius.is_nan() || radius <= 0.0 {
            return Err(Error::Domain(format!("sphere radius {radius} must be positive")));
        }
        Ok(Self {
            star_point: center,
            radial: Radial::Sphere { radius },
        })
    }

    pub fn cuboid(center: Vec3, half_extents: Vec3) -> Result<Self> {
        Self::oriented_cuboid(center, half_extents, Rotation3::identity())
    }

    pub fn oriented_cuboid(center: Vec3, half_extents: Vec3, orientation: Rotation3) -> Result<Self> {
        if !half_extents.iter().all(|&h| h > 0.0) {
            return Err(Error::Domain(format!("half extents {half_extents:?} must be positive")));
        }
        Ok(Self {
            star_point: center,
            radial: Radial::Cuboid { half_extents, orientation },
        })
    }

    /// Mesh shape; the star point must lie inside the mesh.
    pub fn mesh(star_point: Vec3, mesh: TriangleMesh) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::EmptyMesh);
        }
        if !mesh.contains(&star_point) {
            return Err(Error::Domain("star point lies outside the mesh".into()));
        }
        Ok(Self {
            star_point,
            radial: Radial::Mesh(mesh),
        })
    }

    pub fn star_point(&self) -> Vec3 {
        self.star_point
    }

    pub fn radial_kind(&self) -> &Radial {
        &self.radial
    }

    /// Boundary distance along `dir`.
    ///
    /// For meshes this is the farthest surface crossing, i.e. the boundary of
    /// the star-convex hull seen from the star point.
    pub fn radial(&self, dir: &SphericalDirection) -> f64 {
        let u = dir.unit_vector();
        match &self.radial {
            Radial::Series(c) => c.eval(dir).max(0.0),
            Radial::Sphere { radius } => *radius,
            Radial::Cuboid { half_extents, orientation } => cuboid_radial(half_extents, &orientation.inverse().apply(&u)),
            Radial::Mesh(mesh) => farthest_hit(mesh, &self.star_point, &u).unwrap_or(0.0),
        }
    }

    pub fn contains(&self, p: &Vec3) -> bool {
        let d = p - self.star_point;
        match &self.radial {
            Radial::Series(c) => {
                let r = d.norm();
                if r == 0.0 {
                    return true;
                }
                r <= c.eval(&SphericalDirection::from_vector(&d)).max(0.0)
            }
            Radial::Sphere { radius } => d.norm() <= *radius,
            Radial::Cuboid { half_extents, orientation } => {
                let body = orientation.inverse().apply(&d);
                (0..3).all(|i| body[i].abs() <= half_extents[i])
            }
            Radial::Mesh(mesh) => mesh.contains(p),
        }
    }

    /// Returns a containment predicate with any per-shape scratch state reused
    /// across calls.
    pub(crate) fn containment(&self) -> impl FnMut(&Vec3) -> bool + '_ {
        let mut eval = match &self.radial {
            Radial::Series(c) => Some((BasisEvaluator::new(c.degree()), c.magnitude_bound())),
            _ => None,
        };
        move |p: &Vec3| match (&self.radial, eval.as_mut()) {
            (Radial::Series(c), Some((e, bound))) => {
                let d = p - self.star_point;
                let r = d.norm();
                if r == 0.0 {
                    return true;
                }
                if r > *bound {
                    return false;
                }
                r <= e.series(c.weights(), &SphericalDirection::from_vector(&d))
            }
            _ => self.contains(p),
        }
    }

    /// Axis-aligned bounds. Series shapes are bounded through a dense
    /// tessellation widened by 2% of its extent.
    pub fn bounding_box(&self) -> Aabb {
        let c = self.star_point;
        match &self.radial {
            Radial::Sphere { radius } => Aabb::new(c.add_scalar(-radius), c.add_scalar(*radius)),
            Radial::Cuboid { half_extents, orientation } => {
                let half = orientation.matrix().abs() * half_extents;
                Aabb::new(c - half, c + half)
            }
            Radial::Mesh(mesh) => mesh.bounding_box().expect("mesh shapes are non-empty"),
            Radial::Series(coeffs) => {
                let mesh = tessellate(coeffs, &c, 48, 96).expect("valid grid");
                let bb = mesh.bounding_box().expect("tessellation has vertices");
                bb.expanded(0.02 * bb.diagonal().max(1e-9))
            }
        }
    }
}

/// Largest `t >= 0` with `origin + t u` on the mesh (Möller–Trumbore).
fn farthest_hit(mesh: &TriangleMesh, origin: &Vec3, u: &Vec3) -> Option<f64> {
    let mut best: Option<f64> = None;
    for t in 0..mesh.triangles().len() {
        let [a, b, c] = mesh.corners(t);
        let (e1, e2) = (b - a, c - a);
        let p = u.cross(&e2);
        let det = e1.dot(&p);
        if det.abs() < 1e-15 {
            continue;
        }
        let inv = 1.0 / det;
        let s = origin - a;
        let bu = s.dot(&p) * inv;
        if !(0.0..=1.0).contains(&bu) {
            continue;
        }
        let q = s.cross(&e1);
        let bv = u.dot(&q) * inv;
        if bv < 0.0 || bu + bv > 1.0 {
            continue;
        }
        let dist = e2.dot(&q) * inv;
        if dist >= 0.0 && best.is_none_or(|b| dist > b) {
            best = Some(dist);
        }
    }
    best
}

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::StandardNormal;

use super::shape::{Radial, StarConvexShape};
use super::{tessellate, TriangleMesh};
use crate::{Error, Result, Vec3};

/// `n` points on the surface of `shape`, uniform with respect to area.
///
/// Series shapes are sampled from a 64 x 128 tessellation.
pub fn sample_surface<R: Rng + ?Sized>(shape: &StarConvexShape, n: usize, rng: &mut R) -> Result<Vec<Vec3>> {
    if n == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let c = shape.star_point();
    match shape.radial_kind() {
        Radial::Sphere { radius } => Ok((0..n)
            .map(|_| {
                let g = loop {
                    let g = Vec3::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
                    if g.norm() > 1e-12 {
                        break g;
                    }
                };
                c + g.normalize() * *radius
            })
            .collect()),
        Radial::Cuboid {
            half_extents: h,
            orientation,
        } => {
            // faces in order +x, -x, +y, -y, +z, -z
            let areas = [h.y * h.z, h.y * h.z, h.x * h.z, h.x * h.z, h.x * h.y, h.x * h.y];
            let pick = WeightedIndex::new(areas).expect("positive face areas");
            Ok((0..n)
                .map(|_| {
                    let face = pick.sample(rng);
                    let axis = face / 2;
                    let sign = if face % 2 == 0 { 1.0 } else { -1.0 };
                    let mut body = Vec3::from_fn(|i, _| rng.random_range(-h[i]..=h[i]));
                    body[axis] = sign * h[axis];
                    c + orientation.apply(&body)
                })
                .collect())
        }
        Radial::Mesh(mesh) => sample_mesh(mesh, n, rng),
        Radial::Series(coeffs) => sample_mesh(&tessellate(coeffs, &c, 64, 128)?, n, rng),
    }
}

fn sample_mesh<R: Rng + ?Sized>(mesh: &TriangleMesh, n: usize, rng: &mut R) -> Result<Vec<Vec3>> {
    let areas: Vec<f64> = (0..mesh.triangles().len()).map(|t| mesh.triangle_area(t)).collect();
    let pick = WeightedIndex::new(&areas).map_err(|_| Error::EmptyMesh)?;
    Ok((0..n)
        .map(|_| {
            let [a, b, c] = mesh.corners(pick.sample(rng));
            let (r1, r2): (f64, f64) = (rng.random(), rng.random());
            let s = r1.sqrt();
            a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2)
        })
        .collect())
}

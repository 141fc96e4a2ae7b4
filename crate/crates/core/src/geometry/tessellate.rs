use std::f64::consts::{PI, TAU};

use crate::geometry::TriangleMesh;
use crate::sh::{BasisEvaluator, ShCoefficients, SphericalDirection};
use crate::{Error, Result, Vec3};

/// Closed, outward-oriented mesh of the series surface around `star_point`.
///
/// Vertices sit at `theta = pi i / n_theta` (both poles included) and
/// `phi = 2 pi j / n_phi`; radii are clamped at zero.
pub fn tessellate(coeffs: &ShCoefficients, star_point: &Vec3, n_theta: usize, n_phi: usize) -> Result<TriangleMesh> {
    if n_theta < 2 || n_phi < 3 {
        return Err(Error::Domain(format!(
            "tessellation needs n_theta >= 2 and n_phi >= 3, got {n_theta} x {n_phi}"
        )));
    }
    let mut eval = BasisEvaluator::new(coeffs.degree());
    let mut vertex = |theta: f64, phi: f64| -> Vec3 {
        let dir = SphericalDirection::new(theta, phi).expect("grid direction");
        star_point + dir.unit_vector() * eval.series(coeffs.weights(), &dir).max(0.0)
    };

    let rings = n_theta - 1;
    let mut vertices = Vec::with_capacity(2 + rings * n_phi);
    vertices.push(vertex(0.0, 0.0));
    for i in 1..n_theta {
        let theta = PI * i as f64 / n_theta as f64;
        for j in 0..n_phi {
            vertices.push(vertex(theta, TAU * j as f64 / n_phi as f64));
        }
    }
    vertices.push(vertex(PI, 0.0));
    let south = vertices.len() - 1;
    let ring = |i: usize, j: usize| 1 + i * n_phi + j % n_phi;

    let mut triangles = Vec::with_capacity(2 * n_phi * rings);
    for j in 0..n_phi {
        triangles.push([0, ring(0, j), ring(0, j + 1)]);
    }
    for i in 0..rings - 1 {
        for j in 0..n_phi {
            let (a, b) = (ring(i, j), ring(i, j + 1));
            let (c, d) = (ring(i + 1, j + 1), ring(i + 1, j));
            triangles.push([a, d, c]);
            triangles.push([a, c, b]);
        }
    }
    for j in 0..n_phi {
        triangles.push([south, ring(rings - 1, j + 1), ring(rings - 1, j)]);
    }
    Ok(TriangleMesh::from_raw(vertices, triangles))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cuboid_radial, iou, StarConvexShape, VoxelGrid};
    use crate::sh::{fit_coefficients, SphereQuadrature};
    use std::collections::HashMap;

    fn is_closed(mesh: &TriangleMesh) -> bool {
        // every directed edge appears once and its reverse once
        let mut edges: HashMap<(usize, usize), i32> = HashMap::new();
        for t in mesh.triangles() {
            for k in 0..3 {
                *edges.entry((t[k], t[(k + 1) % 3])).or_default() += 1;
            }
        }
        edges.iter().all(|(&(a, b), &n)| n == 1 && edges.get(&(b, a)) == Some(&1))
    }

    #[test]
    fn sphere_vertices_share_radius() {
        let c = Vec3::new(1.0, -2.0, 0.5);
        let mesh = tessellate(&ShCoefficients::sphere(1.7, 3), &c, 16, 32).unwrap();
        assert!(mesh.vertices().iter().all(|v| ((v - c).norm() - 1.7).abs() < 1e-12));
        assert!(is_closed(&mesh));
        assert_eq!(mesh.triangles().len(), 2 * 32 * 15);
        let exact = 4.0 / 3.0 * PI * 1.7f64.powi(3);
        assert!(mesh.volume() > 0.95 * exact && mesh.volume() < exact);
    }

    #[test]
    fn minimal_grid_is_a_bipyramid() {
        let mesh = tessellate(&ShCoefficients::sphere(1.0, 0), &Vec3::zeros(), 2, 3).unwrap();
        assert_eq!(mesh.vertices().len(), 5);
        assert_eq!(mesh.triangles().len(), 6);
        assert!(is_closed(&mesh));
        assert!(mesh.volume() > 0.0);
        assert!(tessellate(&ShCoefficients::sphere(1.0, 0), &Vec3::zeros(), 1, 3).is_err());
        assert!(tessellate(&ShCoefficients::sphere(1.0, 0), &Vec3::zeros(), 4, 2).is_err());
    }

    #[test]
    fn fitted_cuboid_volume() {
        let h = Vec3::new(1.5, 0.5, 0.5);
        let quad = SphereQuadrature::new(64, 128).unwrap();
        let coeffs = fit_coefficients(|d| cuboid_radial(&h, &d.unit_vector()), 8, &quad).unwrap();
        let mesh = tessellate(&coeffs, &Vec3::zeros(), 64, 128).unwrap();
        assert!((mesh.volume() - 3.0).abs() < 0.3, "{}", mesh.volume());

        // voxel volume of the same surface agrees with the divergence volume
        let shape = StarConvexShape::series(Vec3::zeros(), coeffs);
        let grid = VoxelGrid::covering(&[&shape], 96, 0.02).unwrap();
        let voxels = grid.occupancy(&shape).iter().filter(|&&b| b).count() as f64 * grid.cell_volume();
        assert!(
            (voxels - mesh.volume()).abs() < 0.03 * mesh.volume(),
            "{voxels} vs {}",
            mesh.volume()
        );

        let truth = StarConvexShape::cuboid(Vec3::zeros(), h).unwrap();
        let grid = VoxelGrid::covering(&[&shape, &truth], 64, 0.02).unwrap();
        assert!(iou(&shape, &truth, &grid).unwrap() > 0.85);
    }
}

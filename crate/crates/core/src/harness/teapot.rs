use std::f64::consts::TAU;

use crate::geometry::TriangleMesh;
use crate::Vec3;

/// Surface of revolution about z; the first and last profile entries are the
/// poles and must have zero radius. Profile entries are `(z, r)`.
fn lathe(profile: &[(f64, f64)], segments: usize) -> TriangleMesh {
    let rings: Vec<Vec<Vec3>> = profile[1..profile.len() - 1]
        .iter()
        .map(|&(z, r)| circle(Vec3::new(0.0, 0.0, z), Vec3::x(), Vec3::y(), r, segments))
        .collect();
    let (a, b) = (profile[0], profile[profile.len() - 1]);
    closed_sweep(Vec3::new(0.0, 0.0, a.0), &rings, Vec3::new(0.0, 0.0, b.0))
}

/// Tube of varying radius along a polyline in a plane normal to `side`, capped
/// at both ends.
fn tube(path: &[Vec3], radii: &[f64], side: Vec3, segments: usize) -> TriangleMesh {
    let rings: Vec<Vec<Vec3>> = (0..path.len())
        .map(|i| {
            let prev = path[i.saturating_sub(1)];
            let next = path[(i + 1).min(path.len() - 1)];
            let tangent = (next - prev).normalize();
            let normal = side.cross(&tangent).normalize();
            circle(path[i], normal, side, radii[i], segments)
        })
        .collect();
    closed_sweep(path[0], &rings, path[path.len() - 1])
}

fn circle(center: Vec3, u: Vec3, v: Vec3, r: f64, segments: usize) -> Vec<Vec3> {
    (0..segments)
        .map(|j| {
            let a = TAU * j as f64 / segments as f64;
            center + (u * a.cos() + v * a.sin()) * r
        })
        .collect()
}

/// Closes a stack of equally sized rings with a fan at each end, then flips
/// the winding if needed so the enclosed volume is positive.
fn closed_sweep(start: Vec3, rings: &[Vec<Vec3>], end: Vec3) -> TriangleMesh {
    let n = rings[0].len();
    let mut vertices = vec![start];
    for ring in rings {
        vertices.extend_from_slice(ring);
    }
    vertices.push(end);
    let last = vertices.len() - 1;
    let at = |i: usize, j: usize| 1 + i * n + j % n;
    let mut triangles = Vec::new();
    for j in 0..n {
        triangles.push([0, at(0, j), at(0, j + 1)]);
    }
    for i in 0..rings.len() - 1 {
        for j in 0..n {
            triangles.push([at(i, j), at(i + 1, j), at(i + 1, j + 1)]);
            triangles.push([at(i, j), at(i + 1, j + 1), at(i, j + 1)]);
        }
    }
    for j in 0..n {
        triangles.push([last, at(rings.len() - 1, j + 1), at(rings.len() - 1, j)]);
    }
    let mut mesh = TriangleMesh::from_raw(vertices, triangles);
    if mesh.volume() < 0.0 {
        let flipped = mesh.triangles().iter().map(|t| [t[0], t[2], t[1]]).collect();
        mesh = TriangleMesh::from_raw(mesh.vertices().to_vec(), flipped);
    }
    mesh
}

/// A teapot-like solid after the classic Utah teapot: a lathed pot with lid
/// and knob, a tapering spout and a loop handle, scaled to `3.5 x 2.2 x 1.8`
/// units and centred on its bounding box. The parts overlap; containment
/// treats them as a union.
///
/// Returns the mesh and a star point inside the pot body.
pub fn teapot_class_mesh() -> (TriangleMesh, Vec3) {
    const SEG: usize = 48;
    let profile = [
        (3.15, 0.0),
        (3.10, 0.18),
        (2.95, 0.12),
        (2.80, 0.12),
        (2.70, 0.20),
        (2.60, 0.35),
        (2.50, 0.90),
        (2.45, 1.30),
        (2.42, 1.42),
        (2.50, 1.48),
        (2.40, 1.52),
        (2.10, 1.70),
        (1.80, 1.85),
        (1.35, 1.98),
        (0.90, 2.00),
        (0.45, 1.90),
        (0.22, 1.70),
        (0.08, 1.55),
        (0.0, 1.45),
        (0.0, 0.0),
    ];
    let mut mesh = lathe(&profile, SEG);

    let spout = [
        Vec3::new(1.50, 0.0, 1.00),
        Vec3::new(2.30, 0.0, 1.20),
        Vec3::new(2.75, 0.0, 1.70),
        Vec3::new(3.10, 0.0, 2.20),
        Vec3::new(3.30, 0.0, 2.40),
    ];
    mesh.merge(&tube(&spout, &[0.60, 0.45, 0.30, 0.20, 0.15], Vec3::y(), SEG / 2));

    let handle = [
        Vec3::new(-1.60, 0.0, 2.00),
        Vec3::new(-2.30, 0.0, 2.10),
        Vec3::new(-2.80, 0.0, 1.90),
        Vec3::new(-3.00, 0.0, 1.50),
        Vec3::new(-2.80, 0.0, 1.00),
        Vec3::new(-2.40, 0.0, 0.65),
        Vec3::new(-1.80, 0.0, 0.50),
    ];
    mesh.merge(&tube(&handle, &[0.15; 7], Vec3::y(), SEG / 3));

    let bb = mesh.bounding_box().expect("non-empty");
    let target = Vec3::new(3.5, 2.2, 1.8);
    let scale = target.component_div(&bb.extent());
    let center = bb.center();
    let place = |v: &Vec3| (v - center).component_mul(&scale);
    let star = place(&Vec3::new(0.0, 0.0, 1.2));
    (mesh.map_vertices(place), star)
}

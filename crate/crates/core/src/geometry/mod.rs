//! Star-convex shapes, analytic ground-truth primitives, triangle meshes and
//! the voxel IoU metric.

mod coords;
mod io;
mod mesh;
mod sampling;
mod shape;
mod tessellate;
mod voxel;

pub use coords::{cartesian_to_spherical, spherical_to_cartesian};
pub use io::{load_mesh, parse_obj, parse_ply, write_obj};
pub use mesh::TriangleMesh;
pub use sampling::sample_surface;
pub use shape::{cuboid_radial, Radial, StarConvexShape};
pub use tessellate::tessellate;
pub use voxel::{iou, Aabb, VoxelGrid};

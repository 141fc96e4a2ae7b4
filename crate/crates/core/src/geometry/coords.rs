use crate::sh::SphericalDirection;
use crate::{Error, Result, Vec3};

/// `v -> (r, theta, phi)` with `x = r sin(theta) cos(phi)`, `y = r sin(theta) sin(phi)`,
/// `z = r cos(theta)`. The zero vector maps to `(0, 0, 0)`.
pub fn cartesian_to_spherical(v: &Vec3) -> (f64, SphericalDirection) {
    (v.norm(), SphericalDirection::from_vector(v))
}

pub fn spherical_to_cartesian(r: f64, dir: &SphericalDirection) -> Result<Vec3> {
    if r.is_nan() || r < 0.0 {
        return Err(Error::Domain(format!("negative radius {r}")));
    }
    Ok(dir.unit_vector() * r)
}

use nalgebra::{DMatrix, Matrix3, Unit};

use super::basis::{BasisEvaluator, SphericalDirection};
use super::coeffs::{coefficient_count, ShCoefficients};
use super::quadrature::SphereQuadrature;
use crate::{Error, Result, Vec3};

/// Proper rotation of 3-space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation3(nalgebra::Rotation3<f64>);

impl Rotation3 {
    pub fn identity() -> Self {
        Self(nalgebra::Rotation3::identity())
    }

    /// Right-handed rotation by `angle` radians about `axis` (any non-zero length).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Result<Self> {
        let norm = axis.norm();
        if !(norm.is_finite() && norm > 0.0 && angle.is_finite()) {
            return Err(Error::Domain(format!("invalid axis-angle ({axis:?}, {angle})")));
        }
        Ok(Self(nalgebra::Rotation3::from_axis_angle(&Unit::new_unchecked(axis / norm), angle)))
    }

    /// Accepts a matrix that is orthogonal with determinant +1 to within `1e-10`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let err = (m.transpose() * m - Matrix3::identity()).abs().max();
        if err > 1e-10 || (m.determinant() - 1.0).abs() > 1e-10 {
            return Err(Error::Domain("matrix is not a proper rotation".into()));
        }
        Ok(Self(nalgebra::Rotation3::from_matrix_unchecked(m)))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        self.0.matrix()
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    /// `self * other`: apply `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        Self(self.0 * other.0)
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    pub fn powi(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| self.compose(&acc))
    }
}

/// Block-diagonal action of a rotation on coefficient vectors; one orthogonal
/// `(2l+1) x (2l+1)` block per degree.
#[derive(Debug, Clone)]
pub struct DegreeBlockRotation {
    degree: usize,
    blocks: Vec<DMatrix<f64>>,
}

impl DegreeBlockRotation {
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn block(&self, l: usize) -> &DMatrix<f64> {
        &self.blocks[l]
    }

    /// Rotates a raw weight slice of length `(L+1)^2` in place.
    pub fn apply_in_place(&self, weights: &mut [f64]) -> Result<()> {
        if weights.len() != coefficient_count(self.degree) {
            return Err(Error::DimensionMismatch {
                expected: coefficient_count(self.degree),
                found: weights.len(),
            });
        }
        let mut scratch = Vec::with_capacity(2 * self.degree + 1);
        for (l, block) in self.blocks.iter().enumerate() {
            let seg = &mut weights[l * l..(l + 1) * (l + 1)];
            scratch.clear();
            scratch.extend((0..seg.len()).map(|r| (0..seg.len()).map(|c| block[(r, c)] * seg[c]).sum::<f64>()));
            seg.copy_from_slice(&scratch);
        }
        Ok(())
    }
}

/// Builds the per-degree blocks for `rot`.
///
/// Entry `(m', m)` of block `l` is `integral S_l^{m'}(u) S_l^m(R^{-1} u) du`.
/// Rotations map each degree subspace onto itself, so a grid exact to degree
/// `2L` (here `2L + 2`) gives the blocks to rounding error.
pub fn rotation_operator(rot: &Rotation3, degree: usize) -> DegreeBlockRotation {
    let quad = SphereQuadrature::exact_to(2 * degree + 2);
    let inv = rot.inverse();
    let count = coefficient_count(degree);
    let mut eval = BasisEvaluator::new(degree);
    let (mut here, mut there) = (vec![0.0; count], vec![0.0; count]);
    let mut blocks: Vec<DMatrix<f64>> = (0..=degree).map(|l| DMatrix::zeros(2 * l + 1, 2 * l + 1)).collect();
    for (dir, w) in quad.points() {
        eval.eval(dir, &mut here);
        let back = SphericalDirection::from_vector(&inv.apply(&dir.unit_vector()));
        eval.eval(&back, &mut there);
        for (l, block) in blocks.iter_mut().enumerate() {
            let off = l * l;
            let n = 2 * l + 1;
            for r in 0..n {
                let a = w * here[off + r];
                for c in 0..n {
                    block[(r, c)] += a * there[off + c];
                }
            }
        }
    }
    DegreeBlockRotation { degree, blocks }
}

/// Applies `op` degree by degree.
pub fn rotate_coefficients(coeffs: &ShCoefficients, op: &DegreeBlockRotation) -> Result<ShCoefficients> {
    if coeffs.degree() != op.degree {
        return Err(Error::DegreeMismatch {
            expected: op.degree,
            found: coeffs.degree(),
        });
    }
    let mut out = coeffs.clone();
    op.apply_in_place(out.weights_mut())?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sh::{coefficient_index, fit_coefficients};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn identity_gives_identity_blocks() {
        let op = rotation_operator(&Rotation3::identity(), 4);
        for l in 0..=4 {
            let b = op.block(l);
            assert!((b - DMatrix::identity(2 * l + 1, 2 * l + 1)).abs().max() < 1e-12);
        }
    }

    #[test]
    fn blocks_are_orthogonal_and_l0_is_one() {
        let rot = Rotation3::from_axis_angle(&Vec3::new(0.3, -1.0, 0.7), 2.2).unwrap();
        let op = rotation_operator(&rot, 6);
        assert!((op.block(0)[(0, 0)] - 1.0).abs() < 1e-12);
        for l in 0..=6 {
            let b = op.block(l);
            let n = 2 * l + 1;
            assert!((b.transpose() * b - DMatrix::identity(n, n)).abs().max() < 1e-10);
        }
    }

    #[test]
    fn quarter_turn_about_z_maps_cos_to_sin() {
        let rot = Rotation3::from_axis_angle(&Vec3::z(), FRAC_PI_2).unwrap();
        let mut c = ShCoefficients::zeros(2);
        c.set(1, 1, 1.0);
        let rotated = rotate_coefficients(&c, &rotation_operator(&rot, 2)).unwrap();

        // brute force: project the rotated radial function
        let quad = SphereQuadrature::exact_to(8);
        let inv = rot.inverse();
        let brute = fit_coefficients(|d| c.eval(&SphericalDirection::from_vector(&inv.apply(&d.unit_vector()))), 2, &quad).unwrap();
        assert!((brute.get(1, -1).abs() - 1.0).abs() < 1e-10);
        for (i, (a, b)) in rotated.weights().iter().zip(brute.weights()).enumerate() {
            assert!((a - b).abs() < 1e-10, "index {i}");
            if i != coefficient_index(1, -1) {
                assert!(a.abs() < 1e-10);
            }
        }
    }

    #[test]
    fn degree_mismatch() {
        let op = rotation_operator(&Rotation3::identity(), 2);
        assert!(matches!(
            rotate_coefficients(&ShCoefficients::zeros(3), &op),
            Err(Error::DegreeMismatch { expected: 2, found: 3 })
        ));
    }

    #[test]
    fn rotation_validation() {
        assert!(Rotation3::from_axis_angle(&Vec3::zeros(), 1.0).is_err());
        let reflect = Matrix3::from_diagonal(&Vec3::new(1.0, 1.0, -1.0));
        assert!(Rotation3::from_matrix(reflect).is_err());
        let r = Rotation3::from_axis_angle(&Vec3::new(1.0, 2.0, 3.0), 0.4).unwrap();
        let m = r.matrix();
        assert!((m.transpose() * m - Matrix3::identity()).abs().max() < 1e-12);
        assert!((m.determinant() - 1.0).abs() < 1e-12);
        assert!(Rotation3::from_matrix(*m).is_ok());
    }
}

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use super::legendre::{assoc_legendre, NormalizedLegendre};
use crate::{Error, Result, Vec3};

/// A point on the unit sphere: colatitude `theta` in `[0, pi]` and azimuth
/// `phi` in `[0, 2 pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphericalDirection {
    theta: f64,
    phi: f64,
}

impl SphericalDirection {
    /// Validates `theta` and wraps `phi` into `[0, 2 pi)`.
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !phi.is_finite() {
            return Err(Error::Domain(format!("non-finite direction ({theta}, {phi})")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::Domain(format!("colatitude {theta} outside [0, pi]")));
        }
        Ok(Self {
            theta,
            phi: wrap_azimuth(phi),
        })
    }

    /// Direction of `v`. The zero vector and vectors on the polar axis get `phi = 0`.
    pub fn from_vector(v: &Vec3) -> Self {
        let rho = v.x.hypot(v.y);
        let theta = rho.atan2(v.z);
        let phi = if v.x == 0.0 && v.y == 0.0 {
            0.0
        } else {
            wrap_azimuth(v.y.atan2(v.x))
        };
        Self { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> Vec3 {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vec3::new(st * cp, st * sp, ct)
    }
}

fn wrap_azimuth(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

fn check_order(l: usize, m: i64) -> Result<()> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::Domain(format!("|m|={} exceeds degree l={l}", m.abs())));
    }
    Ok(())
}

fn norm_constant(l: usize, m: usize) -> f64 {
    let ratio: f64 = ((l - m + 1)..=(l + m)).map(|k| 1.0 / k as f64).product();
    ((2 * l + 1) as f64 / (4.0 * PI) * ratio).sqrt()
}

/// Real basis function `S_l^m` in its simplified form.
pub fn real_basis(l: usize, m: i64, dir: &SphericalDirection) -> Result<f64> {
    check_order(l, m)?;
    let am = m.unsigned_abs() as usize;
    let radial = norm_constant(l, am) * assoc_legendre(l, am, dir.theta.cos())?;
    Ok(match m {
        0 => radial,
        m if m > 0 => radial * SQRT_2 * (m as f64 * dir.phi).cos(),
        m => radial * SQRT_2 * (-m as f64 * dir.phi).sin(),
    })
}

/// Complex basis function `Y_l^m = (-1)^m N_l^m P_l^m(cos theta) e^{i m phi}`,
/// with `Y_l^{-m} = (-1)^m conj(Y_l^m)` for negative orders.
pub fn complex_basis(l: usize, m: i64, dir: &SphericalDirection) -> Result<Complex<f64>> {
    check_order(l, m)?;
    let am = m.unsigned_abs() as usize;
    let sign = if am.is_multiple_of(2) { 1.0 } else { -1.0 };
    let magnitude = sign * norm_constant(l, am) * assoc_legendre(l, am, dir.theta.cos())?;
    let positive = Complex::from_polar(1.0, am as f64 * dir.phi) * magnitude;
    Ok(if m >= 0 { positive } else { positive.conj() * sign })
}

/// Reusable evaluator for all `(L+1)^2` real basis functions at one direction.
#[derive(Debug, Clone)]
pub struct BasisEvaluator {
    legendre: NormalizedLegendre,
    cos_m: Vec<f64>,
    sin_m: Vec<f64>,
}

impl BasisEvaluator {
    pub fn new(degree: usize) -> Self {
        Self {
            legendre: NormalizedLegendre::new(degree),
            cos_m: vec![0.0; degree + 1],
            sin_m: vec![0.0; degree + 1],
        }
    }

    pub fn degree(&self) -> usize {
        self.legendre.degree()
    }

    fn prepare(&mut self, dir: &SphericalDirection) {
        let (st, ct) = dir.theta.sin_cos();
        self.legendre.compute(ct, st);
        let (s1, c1) = dir.phi.sin_cos();
        self.cos_m[0] = 1.0;
        self.sin_m[0] = 0.0;
        for m in 1..self.cos_m.len() {
            let (c, s) = (self.cos_m[m - 1], self.sin_m[m - 1]);
            self.cos_m[m] = c * c1 - s * s1;
            self.sin_m[m] = s * c1 + c * s1;
        }
    }

    /// Writes `S_l^m(dir)` to `out[l^2 + l + m]`.
    pub fn eval(&mut self, dir: &SphericalDirection, out: &mut [f64]) {
        let degree = self.degree();
        assert_eq!(out.len(), (degree + 1) * (degree + 1));
        self.prepare(dir);
        for l in 0..=degree {
            let centre = l * l + l;
            out[centre] = self.legendre.get(l, 0);
            for m in 1..=l {
                let p = SQRT_2 * self.legendre.get(l, m);
                out[centre + m] = p * self.cos_m[m];
                out[centre - m] = p * self.sin_m[m];
            }
        }
    }

    /// Series value `sum w_l^m S_l^m(dir)` for the weights of degree `L <= self.degree()`.
    pub fn series(&mut self, weights: &[f64], dir: &SphericalDirection) -> f64 {
        let degree = (weights.len() as f64).sqrt() as usize - 1;
        debug_assert_eq!((degree + 1) * (degree + 1), weights.len());
        debug_assert!(degree <= self.degree());
        self.prepare(dir);
        let mut sum = 0.0;
        for l in 0..=degree {
            let centre = l * l + l;
            sum += weights[centre] * self.legendre.get(l, 0);
            for m in 1..=l {
                let p = SQRT_2 * self.legendre.get(l, m);
                sum += p * (weights[centre + m] * self.cos_m[m] + weights[centre - m] * self.sin_m[m]);
            }
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dir(theta: f64, phi: f64) -> SphericalDirection {
        SphericalDirection::new(theta, phi).unwrap()
    }

    #[test]
    fn real_basis_spot_values() {
        let c00 = 0.282_094_791_773_878_1;
        assert!((real_basis(0, 0, &dir(1.1, 4.0)).unwrap() - c00).abs() < 1e-12);
        assert!((real_basis(1, 0, &dir(0.0, 0.0)).unwrap() - 0.488_602_511_902_919_9).abs() < 1e-12);
        assert!((real_basis(1, 1, &dir(PI / 2.0, 0.0)).unwrap() - 0.488_602_511_902_919_9).abs() < 1e-12);
        assert!(matches!(real_basis(2, 3, &dir(0.1, 0.1)), Err(Error::Domain(_))));
    }

    #[test]
    fn complex_basis_spot_values() {
        let y00 = complex_basis(0, 0, &dir(2.0, 1.0)).unwrap();
        assert!((y00.re - 0.282_094_791_773_878_1).abs() < 1e-12 && y00.im == 0.0);
        let y10 = complex_basis(1, 0, &dir(PI / 2.0, 0.3)).unwrap();
        assert!(y10.norm() < 1e-15);
        let y11 = complex_basis(1, 1, &dir(PI / 2.0, 0.0)).unwrap();
        assert!((y11.re + 0.345_494_149_471_335_5).abs() < 1e-12 && y11.im.abs() < 1e-15);
        assert!(complex_basis(1, -2, &dir(0.1, 0.1)).is_err());
    }

    /// The real basis is the combination of complex ones that removes the imaginary part.
    #[test]
    fn real_from_complex_combination() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let d = dir(rng.random_range(0.0..PI), rng.random_range(0.0..TAU));
            let l = rng.random_range(0..=8usize);
            let m = rng.random_range(-(l as i64)..=l as i64);
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            let combined = if m > 0 {
                let y = complex_basis(l, m, &d).unwrap();
                (y + y.conj()) * (sign / SQRT_2)
            } else if m == 0 {
                complex_basis(l, 0, &d).unwrap()
            } else {
                let y = complex_basis(l, -m, &d).unwrap();
                (y - y.conj()) * sign / Complex::new(0.0, SQRT_2)
            };
            let s = real_basis(l, m, &d).unwrap();
            assert!(combined.im.abs() < 1e-12);
            assert!((combined.re - s).abs() < 1e-12, "l={l} m={m}");
        }
    }

    #[test]
    fn evaluator_matches_pointwise_basis() {
        let mut eval = BasisEvaluator::new(10);
        let mut out = vec![0.0; 121];
        for &(t, p) in &[(0.0, 0.0), (0.3, 5.9), (PI / 2.0, 1.0), (PI, 0.0), (2.5, 3.3)] {
            let d = dir(t, p);
            eval.eval(&d, &mut out);
            for l in 0..=10usize {
                for m in -(l as i64)..=(l as i64) {
                    let idx = (l * l + l) as i64 + m;
                    let direct = real_basis(l, m, &d).unwrap();
                    assert!((out[idx as usize] - direct).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn direction_normalization() {
        let d = dir(1.0, -0.5);
        assert!((d.phi() - (TAU - 0.5)).abs() < 1e-15);
        assert_eq!(dir(1.0, TAU).phi(), 0.0);
        assert!(SphericalDirection::new(-0.1, 0.0).is_err());
        assert!(SphericalDirection::new(3.2, 0.0).is_err());
        let pole = SphericalDirection::from_vector(&Vec3::new(-0.0, 0.0, -2.0));
        assert_eq!((pole.theta(), pole.phi()), (PI, 0.0));
    }
}

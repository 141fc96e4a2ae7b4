use std::f64::consts::{PI, TAU};

use super::basis::{BasisEvaluator, SphericalDirection};
use super::coeffs::{coefficient_count, ShCoefficients};
use crate::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pn1 = if n == 0 { 0.0 } else { p0 };
            dp = nf * (x * pn - pn1) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Product rule on the sphere: Gauss–Legendre in `cos(theta)` times the
/// uniform trapezoid rule in `phi`.
#[derive(Debug, Clone)]
pub struct SphereQuadrature {
    n_theta: usize,
    n_phi: usize,
    points: Vec<(SphericalDirection, f64)>,
}

impl SphereQuadrature {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Domain("quadrature needs at least one node per axis".into()));
        }
        let (xs, ws) = gauss_legendre(n_theta);
        let dphi = TAU / n_phi as f64;
        let mut points = Vec::with_capacity(n_theta * n_phi);
        for (x, w) in xs.iter().zip(&ws) {
            let theta = x.clamp(-1.0, 1.0).acos();
            for j in 0..n_phi {
                let dir = SphericalDirection::new(theta, j as f64 * dphi)?;
                points.push((dir, w * dphi));
            }
        }
        Ok(Self { n_theta, n_phi, points })
    }

    /// Smallest grid integrating every spherical polynomial of degree `<= degree` exactly.
    pub fn exact_to(degree: usize) -> Self {
        Self::new(degree / 2 + 1, degree + 1).expect("non-empty grid")
    }

    /// Highest polynomial degree integrated exactly.
    pub fn exactness(&self) -> usize {
        (2 * self.n_theta - 1).min(self.n_phi - 1)
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn points(&self) -> &[(SphericalDirection, f64)] {
        &self.points
    }

    pub fn integrate(&self, mut f: impl FnMut(&SphericalDirection) -> f64) -> f64 {
        self.points.iter().map(|(d, w)| w * f(d)).sum()
    }
}

/// Projects `radial` onto the real basis up to degree `L`:
/// `w_l^m = integral radial(u) S_l^m(u) du`.
///
/// The grid must integrate degree-`2L` products exactly, so band-limited input
/// is reproduced up to rounding.
pub fn fit_coefficients(
    radial: impl Fn(&SphericalDirection) -> f64,
    degree: usize,
    quadrature: &SphereQuadrature,
) -> Result<ShCoefficients> {
    if quadrature.exactness() < 2 * degree {
        return Err(Error::QuadratureTooLow {
            exactness: quadrature.exactness(),
            required: 2 * degree,
        });
    }
    let count = coefficient_count(degree);
    let mut eval = BasisEvaluator::new(degree);
    let mut basis = vec![0.0; count];
    let mut weights = vec![0.0; count];
    for (dir, w) in quadrature.points() {
        let value = radial(dir) * w;
        eval.eval(dir, &mut basis);
        for (acc, b) in weights.iter_mut().zip(&basis) {
            *acc += value * b;
        }
    }
    ShCoefficients::new(degree, weights)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sh::{coefficient_index, real_basis};

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let (x, w) = gauss_legendre(n);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            for p in 0..(2 * n) {
                let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(p as i32)).sum();
                let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p + 1) as f64 };
                assert!((got - exact).abs() < 1e-13, "n={n} p={p}");
            }
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn orthonormal_basis_under_quadrature() {
        let quad = SphereQuadrature::exact_to(12);
        let count = coefficient_count(6);
        let mut eval = BasisEvaluator::new(6);
        let mut gram = vec![0.0; count * count];
        let mut b = vec![0.0; count];
        for (d, w) in quad.points() {
            eval.eval(d, &mut b);
            for i in 0..count {
                for j in 0..count {
                    gram[i * count + j] += w * b[i] * b[j];
                }
            }
        }
        for i in 0..count {
            for j in 0..count {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((gram[i * count + j] - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn fit_constant_and_single_basis() {
        let quad = SphereQuadrature::exact_to(8);
        let c = fit_coefficients(|_| 1.0, 2, &quad).unwrap();
        assert!((c.weights()[0] - 3.544_907_701_811_032).abs() < 1e-10);
        assert!(c.weights()[1..].iter().all(|w| w.abs() < 1e-10));

        let c = fit_coefficients(|d| real_basis(2, 1, d).unwrap(), 4, &quad).unwrap();
        for (i, w) in c.weights().iter().enumerate() {
            let expected = if i == coefficient_index(2, 1) { 1.0 } else { 0.0 };
            assert!((w - expected).abs() < 1e-8);
        }
    }

    #[test]
    fn fit_rejects_coarse_grid() {
        let quad = SphereQuadrature::new(3, 5).unwrap();
        assert_eq!(quad.exactness(), 4);
        assert!(fit_coefficients(|_| 1.0, 2, &quad).is_ok());
        assert!(matches!(
            fit_coefficients(|_| 1.0, 3, &quad),
            Err(Error::QuadratureTooLow { exactness: 4, required: 6 })
        ));
    }
}

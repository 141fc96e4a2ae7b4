use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::basis::{BasisEvaluator, SphericalDirection};
use crate::{Error, Result};

/// Number of basis functions up to degree `L`: `(L+1)^2`.
pub const fn coefficient_count(degree: usize) -> usize {
    (degree + 1) * (degree + 1)
}

/// Linear index of `w_l^m`: `l^2 + l + m`.
#[inline]
pub fn coefficient_index(l: usize, m: i64) -> usize {
    debug_assert!(m.unsigned_abs() as usize <= l);
    ((l * l + l) as i64 + m) as usize
}

/// Weights of a real spherical-harmonics series truncated at degree `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficients")]
pub struct ShCoefficients {
    degree: usize,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct RawCoefficients {
    degree: usize,
    weights: Vec<f64>,
}

impl TryFrom<RawCoefficients> for ShCoefficients {
    type Error = Error;

    fn try_from(raw: RawCoefficients) -> Result<Self> {
        ShCoefficients::new(raw.degree, raw.weights)
    }
}

impl ShCoefficients {
    pub fn new(degree: usize, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != coefficient_count(degree) {
            return Err(Error::BadCoefficientLength { len: weights.len() });
        }
        Ok(Self { degree, weights })
    }

    /// Infers `L` from the weight count.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let degree = degree_for_len(weights.len()).ok_or(Error::BadCoefficientLength { len: weights.len() })?;
        Ok(Self { degree, weights })
    }

    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            weights: vec![0.0; coefficient_count(degree)],
        }
    }

    /// Sphere of the given radius: only `w_0^0 = r sqrt(4 pi)` is non-zero.
    pub fn sphere(radius: f64, degree: usize) -> Self {
        let mut c = Self::zeros(degree);
        c.weights[0] = radius * (4.0 * PI).sqrt();
        c
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn into_weights(self) -> Vec<f64> {
        self.weights
    }

    pub fn get(&self, l: usize, m: i64) -> f64 {
        self.weights[coefficient_index(l, m)]
    }

    pub fn set(&mut self, l: usize, m: i64, value: f64) {
        self.weights[coefficient_index(l, m)] = value;
    }

    /// Weights of degree `l`, ordered `m = -l..=l`.
    pub fn block(&self, l: usize) -> &[f64] {
        &self.weights[l * l..(l + 1) * (l + 1)]
    }

    /// Copy truncated or zero-padded to another degree.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zeros(degree);
        let n = out.weights.len().min(self.weights.len());
        out.weights[..n].copy_from_slice(&self.weights[..n]);
        out
    }

    pub fn eval(&self, dir: &SphericalDirection) -> f64 {
        eval_series(self, dir)
    }

    /// Upper bound on `|f|` over the sphere.
    ///
    /// Per degree, `sum_m S_l^m(u)^2 = (2l+1)/(4 pi)`, so Cauchy–Schwarz bounds
    /// each degree's contribution by its block norm times `sqrt((2l+1)/(4 pi))`.
    pub fn magnitude_bound(&self) -> f64 {
        (0..=self.degree)
            .map(|l| {
                let norm = self.block(l).iter().map(|w| w * w).sum::<f64>().sqrt();
                norm * ((2 * l + 1) as f64 / (4.0 * PI)).sqrt()
            })
            .sum()
    }
}

fn degree_for_len(len: usize) -> Option<usize> {
    let root = (len as f64).sqrt().round() as usize;
    (root >= 1 && root * root == len).then(|| root - 1)
}

/// `f(theta, phi) = sum_l sum_m w_l^m S_l^m(theta, phi)`.
pub fn eval_series(coeffs: &ShCoefficients, dir: &SphericalDirection) -> f64 {
    BasisEvaluator::new(coeffs.degree).series(&coeffs.weights, dir)
}

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::geometry::{tessellate, write_obj};
use crate::sh::{coefficient_count, ShCoefficients};
use crate::ukf::GaussianBelief;
use crate::{Error, Result, Vec3};

/// Writes the tessellated series surface as OBJ.
pub fn export_mesh(coeffs: &ShCoefficients, star_point: &Vec3, path: impl AsRef<Path>, resolution: (usize, usize)) -> Result<()> {
    let mesh = tessellate(coeffs, star_point, resolution.0, resolution.1)?;
    write_obj(&mesh, path)
}

/// JSON form of a tracker belief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefSnapshot {
    pub degree: usize,
    /// Human-readable reminder of the packing order.
    pub layout: String,
    pub mean: Vec<f64>,
    /// Row-major rows.
    pub covariance: Vec<Vec<f64>>,
}

const LAYOUT: &str = "p1 p2 p3 w(0,0) w(1,-1) w(1,0) w(1,1) ... indexed l*l+l+m";

impl BeliefSnapshot {
    pub fn from_belief(belief: &GaussianBelief) -> Result<Self> {
        let n = belief.dim();
        let degree = degree_for_dim(n)?;
        Ok(Self {
            degree,
            layout: LAYOUT.to_string(),
            mean: belief.mean.iter().copied().collect(),
            covariance: (0..n).map(|r| belief.covariance.row(r).iter().copied().collect()).collect(),
        })
    }

    pub fn to_belief(&self) -> Result<GaussianBelief> {
        let n = 3 + coefficient_count(self.degree);
        if self.mean.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: self.mean.len(),
            });
        }
        let cov = if self.covariance.is_empty() {
            DMatrix::zeros(n, n)
        } else {
            if self.covariance.len() != n || self.covariance.iter().any(|r| r.len() != n) {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: self.covariance.len(),
                });
            }
            DMatrix::from_fn(n, n, |r, c| self.covariance[r][c])
        };
        GaussianBelief::new(DVector::from_vec(self.mean.clone()), cov)
    }

    pub fn position(&self) -> Vec3 {
        Vec3::new(self.mean[0], self.mean[1], self.mean[2])
    }

    pub fn coefficients(&self) -> Result<ShCoefficients> {
        ShCoefficients::new(self.degree, self.mean.get(3..).unwrap_or_default().to_vec())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, serde_json::to_string_pretty(self)?).map_err(|e| Error::io(path, e))
    }
}

fn degree_for_dim(n: usize) -> Result<usize> {
    let count = n.checked_sub(3).ok_or(Error::BadCoefficientLength { len: 0 })?;
    let root = (count as f64).sqrt().round() as usize;
    if root == 0 || root * root != count {
        return Err(Error::BadCoefficientLength { len: count });
    }
    Ok(root - 1)
}

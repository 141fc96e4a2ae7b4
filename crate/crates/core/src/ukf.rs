//! Additive-noise unscented Kalman filter.
//!
//! Sigma points use the scaled symmetric set: the mean plus and minus the
//! columns of `sqrt(n + lambda) * chol(P)`, with `lambda = alpha^2 (n + kappa) - n`.
//! Both the system and the measurement noise enter additively, so the state is
//! never augmented.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Gaussian state estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianBelief {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

impl GaussianBelief {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        let n = mean.len();
        if covariance.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: covariance.nrows(),
            });
        }
        let mut belief = Self { mean, covariance };
        belief.symmetrize();
        Ok(belief)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    fn symmetrize(&mut self) {
        let t = self.covariance.transpose();
        self.covariance += t;
        self.covariance *= 0.5;
    }
}

/// Sigma-point spread parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UkfParams {
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
}

impl Default for UkfParams {
    /// `alpha = 1, beta = 2, kappa = 0`: `lambda = 0`, the plain symmetric set.
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 2.0,
            kappa: 0.0,
        }
    }
}

impl UkfParams {
    pub fn lambda(&self, n: usize) -> f64 {
        self.alpha * self.alpha * (n as f64 + self.kappa) - n as f64
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Config(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        let spread = n as f64 + self.lambda(n);
        if spread.is_nan() || spread <= 0.0 {
            return Err(Error::Config(format!("n + lambda must be positive for n = {n}")));
        }
        Ok(())
    }
}

/// `2n + 1` weighted points; column `i` of `points` is point `i`.
#[derive(Debug, Clone)]
pub struct SigmaPointSet {
    pub points: DMatrix<f64>,
    pub mean_weights: DVector<f64>,
    pub cov_weights: DVector<f64>,
}

impl SigmaPointSet {
    pub fn len(&self) -> usize {
        self.points.ncols()
    }

    pub fn is_empty(&self) -> bool {
        self.points.ncols() == 0
    }

    /// Weighted mean and covariance of the points themselves.
    pub fn reconstruct(&self) -> (DVector<f64>, DMatrix<f64>) {
        weighted_moments(&self.points, &self.mean_weights, &self.cov_weights)
    }
}

fn weighted_moments(points: &DMatrix<f64>, wm: &DVector<f64>, wc: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let mean = points * wm;
    let dev = deviations(points.clone(), &mean);
    let cov = weighted_columns(&dev, wc) * dev.transpose();
    (mean, cov)
}

/// Lower Cholesky factor, adding diagonal jitter from `1e-12` up to `1e-6` of
/// `trace / n` when the plain factorization fails.
fn robust_cholesky(p: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(c) = p.clone().cholesky() {
        return Ok(c.l());
    }
    let n = p.nrows();
    let scale = (p.trace() / n as f64).abs().max(f64::MIN_POSITIVE);
    let mut rel = 1e-12;
    while rel <= 1e-6 * (1.0 + 1e-9) {
        let jittered = p + DMatrix::identity(n, n) * (rel * scale);
        if let Some(c) = jittered.cholesky() {
            log::debug!("covariance repaired with relative jitter {rel:e}");
            return Ok(c.l());
        }
        rel *= 10.0;
    }
    Err(Error::CholeskyFailed)
}

pub fn sigma_points(belief: &GaussianBelief, params: &UkfParams) -> Result<SigmaPointSet> {
    let n = belief.dim();
    params.validate(n)?;
    let lambda = params.lambda(n);
    let gamma = (n as f64 + lambda).sqrt();
    let root = robust_cholesky(&belief.covariance)? * gamma;

    let mut points = DMatrix::zeros(n, 2 * n + 1);
    points.set_column(0, &belief.mean);
    for i in 0..n {
        let offset = root.column(i);
        points.set_column(1 + i, &(&belief.mean + offset));
        points.set_column(1 + n + i, &(&belief.mean - offset));
    }
    let rest = 1.0 / (2.0 * (n as f64 + lambda));
    let mut mean_weights = DVector::from_element(2 * n + 1, rest);
    let mut cov_weights = mean_weights.clone();
    mean_weights[0] = lambda / (n as f64 + lambda);
    cov_weights[0] = mean_weights[0] + 1.0 - params.alpha * params.alpha + params.beta;
    Ok(SigmaPointSet {
        points,
        mean_weights,
        cov_weights,
    })
}

fn propagate(set: &SigmaPointSet, f: &mut impl FnMut(&DVector<f64>) -> DVector<f64>) -> Result<DMatrix<f64>> {
    let mut out: Option<DMatrix<f64>> = None;
    for (i, col) in set.points.column_iter().enumerate() {
        let y = f(&col.into_owned());
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite(format!("sigma point {i} propagated to {y:?}")));
        }
        let m = out.get_or_insert_with(|| DMatrix::zeros(y.len(), set.len()));
        if y.len() != m.nrows() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                found: y.len(),
            });
        }
        m.set_column(i, &y);
    }
    Ok(out.expect("at least one sigma point"))
}

/// Time update through `system` plus additive process noise `q`.
pub fn predict(
    belief: &GaussianBelief,
    mut system: impl FnMut(&DVector<f64>) -> DVector<f64>,
    q: &DMatrix<f64>,
    params: &UkfParams,
) -> Result<GaussianBelief> {
    let set = sigma_points(belief, params)?;
    let propagated = propagate(&set, &mut system)?;
    let (mean, cov) = weighted_moments(&propagated, &set.mean_weights, &set.cov_weights);
    if q.shape() != cov.shape() {
        return Err(Error::DimensionMismatch {
            expected: cov.nrows(),
            found: q.nrows(),
        });
    }
    GaussianBelief::new(mean, cov + q)
}

/// Measurement update with `y = h(x) + v`, `v ~ N(0, r)`.
///
/// A singular innovation covariance is reported as an error and the caller's
/// belief is left as it was.
pub fn update(
    belief: &GaussianBelief,
    mut measurement: impl FnMut(&DVector<f64>) -> DVector<f64>,
    y: &DVector<f64>,
    r: &DMatrix<f64>,
    params: &UkfParams,
) -> Result<GaussianBelief> {
    let set = sigma_points(belief, params)?;
    let predicted = propagate(&set, &mut measurement)?;
    let m = predicted.nrows();
    if y.len() != m || r.shape() != (m, m) {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: y.len(),
        });
    }
    let y_hat = &predicted * &set.mean_weights;
    let dy = deviations(predicted, &y_hat);
    let dx = deviations(set.points.clone(), &belief.mean);
    let wdy = weighted_columns(&dy, &set.cov_weights);
    let s = &wdy * dy.transpose() + r;
    let pxy = dx * wdy.transpose();
    let s_inv = s
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .or_else(|| s.clone().try_inverse())
        .filter(|inv| inv.iter().all(|v| v.is_finite()))
        .ok_or(Error::SingularInnovation)?;
    let gain = &pxy * s_inv;
    let mean = &belief.mean + &gain * (y - y_hat);
    let covariance = &belief.covariance - &gain * s * gain.transpose();
    GaussianBelief::new(mean, covariance)
}

fn deviations(mut points: DMatrix<f64>, mean: &DVector<f64>) -> DMatrix<f64> {
    for mut col in points.column_iter_mut() {
        col -= mean;
    }
    points
}

fn weighted_columns(m: &DMatrix<f64>, w: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)] * w[c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_spd(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        &a * a.transpose() + DMatrix::identity(n, n) * 0.1
    }

    fn random_belief(n: usize, rng: &mut ChaCha8Rng) -> GaussianBelief {
        let mean = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
        GaussianBelief::new(mean, random_spd(n, rng)).unwrap()
    }

    #[test]
    fn scalar_sigma_points() {
        let b = GaussianBelief::new(DVector::from_element(1, 0.0), DMatrix::from_element(1, 1, 1.0)).unwrap();
        let set = sigma_points(&b, &UkfParams::default()).unwrap();
        assert_eq!(set.points.as_slice(), &[0.0, 1.0, -1.0]);
        assert_eq!(set.mean_weights.as_slice(), &[0.0, 0.5, 0.5]);
        assert_eq!(set.cov_weights[0], 2.0);
    }

    #[test]
    fn diagonal_offsets() {
        let cov = DMatrix::from_diagonal(&DVector::from_vec(vec![4.0, 9.0]));
        let b = GaussianBelief::new(DVector::zeros(2), cov).unwrap();
        let params = UkfParams {
            alpha: 1.0,
            beta: 2.0,
            kappa: 1.0,
        };
        let set = sigma_points(&b, &params).unwrap();
        let s3 = 3f64.sqrt();
        assert!((set.points.column(1) - DVector::from_vec(vec![2.0 * s3, 0.0])).norm() < 1e-12);
        assert!((set.points.column(2) - DVector::from_vec(vec![0.0, 3.0 * s3])).norm() < 1e-12);
        assert!((set.points.column(3) + DVector::from_vec(vec![2.0 * s3, 0.0])).norm() < 1e-12);
    }

    #[test]
    fn reconstruction_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 1..=12 {
            let b = random_belief(n, &mut rng);
            for params in [
                UkfParams::default(),
                UkfParams {
                    alpha: 0.5,
                    beta: 2.0,
                    kappa: 1.0,
                },
            ] {
                let set = sigma_points(&b, &params).unwrap();
                assert_eq!(set.len(), 2 * n + 1);
                assert!((set.mean_weights.sum() - 1.0).abs() < 1e-12);
                let (m, c) = set.reconstruct();
                assert!((m - &b.mean).norm() < 1e-10);
                // the central covariance weight adds (1 - alpha^2 + beta) times a zero deviation
                assert!((c - &b.covariance).abs().max() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_prediction() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let b = random_belief(5, &mut rng);
        let p = UkfParams::default();
        let same = predict(&b, |x| x.clone(), &DMatrix::zeros(5, 5), &p).unwrap();
        assert!((same.mean.clone() - &b.mean).norm() < 1e-10);
        assert!((same.covariance.clone() - &b.covariance).abs().max() < 1e-10);
        let q = DMatrix::identity(5, 5) * 0.04;
        let grown = predict(&b, |x| x.clone(), &q, &p).unwrap();
        assert!((grown.covariance - &b.covariance - q).abs().max() < 1e-10);
    }

    #[test]
    fn matches_kalman_filter_on_linear_models() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = UkfParams::default();
        for _ in 0..50 {
            let n = rng.random_range(1..=10);
            let m = rng.random_range(1..=n.min(4));
            let b = random_belief(n, &mut rng);
            let a = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
            let h = DMatrix::from_fn(m, n, |_, _| rng.random_range(-1.0..1.0));
            let (q, r) = (random_spd(n, &mut rng), random_spd(m, &mut rng));
            let y = DVector::from_fn(m, |_, _| rng.random_range(-3.0..3.0));

            let ukf = predict(&b, |x| &a * x, &q, &p).unwrap();
            let ukf = update(&ukf, |x| &h * x, &y, &r, &p).unwrap();

            let mp = &a * &b.mean;
            let pp = &a * &b.covariance * a.transpose() + &q;
            let s = &h * &pp * h.transpose() + &r;
            let k = &pp * h.transpose() * s.clone().try_inverse().unwrap();
            let mk = &mp + &k * (&y - &h * &mp);
            let pk = &pp - &k * &s * k.transpose();

            let rel = |a: f64, scale: f64| a / scale.max(1.0);
            assert!(rel((ukf.mean - &mk).amax(), mk.amax()) < 1e-8);
            assert!(rel((ukf.covariance - &pk).amax(), pk.amax()) < 1e-8);
        }
    }

    #[test]
    fn exact_measurement_shrinks_covariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let b = random_belief(3, &mut rng);
        let r = DMatrix::identity(3, 3) * 0.1;
        let out = update(&b, |x| x.clone(), &b.mean.clone(), &r, &UkfParams::default()).unwrap();
        assert!((out.mean.clone() - &b.mean).norm() < 1e-12);
        assert!(out.covariance.trace() < b.covariance.trace());
        let eig = out.covariance.symmetric_eigenvalues();
        assert!(eig.min() > -1e-9);
    }

    #[test]
    fn repeated_updates_converge_monotonically() {
        let b = GaussianBelief::new(DVector::from_vec(vec![0.0, 0.0]), DMatrix::identity(2, 2) * 4.0).unwrap();
        let y = DVector::from_vec(vec![3.0, -1.0]);
        let r = DMatrix::identity(2, 2);
        let mut cur = b;
        let mut last = f64::INFINITY;
        // scalar closed form: P_k = 4 / (1 + 4k), mean_k = y (1 - 1 / (1 + 4k))
        for k in 1..=20 {
            cur = update(&cur, |x| x.clone(), &y, &r, &UkfParams::default()).unwrap();
            let gap = (&cur.mean - &y).norm();
            assert!(gap < last);
            last = gap;
            let expected = &y * (1.0 - 1.0 / (1.0 + 4.0 * k as f64));
            assert!((&cur.mean - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn failure_modes() {
        let b = GaussianBelief::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        let p = UkfParams::default();
        let nan = predict(&b, |x| x.map(|v| if v > 0.5 { f64::NAN } else { v }), &DMatrix::zeros(2, 2), &p);
        assert!(matches!(nan, Err(Error::NonFinite(_))));
        let zero_r = update(
            &b,
            |x| DVector::from_element(1, 0.0 * x[0]),
            &DVector::zeros(1),
            &DMatrix::zeros(1, 1),
            &p,
        );
        assert!(matches!(zero_r, Err(Error::SingularInnovation)));
        let indefinite = GaussianBelief::new(DVector::zeros(2), DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0]))).unwrap();
        assert!(matches!(sigma_points(&indefinite, &p), Err(Error::CholeskyFailed)));
        let bad = UkfParams { alpha: 0.0, ..p };
        assert!(matches!(sigma_points(&b, &bad), Err(Error::Config(_))));
    }

    #[test]
    fn jitter_repairs_semidefinite_covariance() {
        let v = DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let cov = &v * v.transpose();
        let b = GaussianBelief::new(DVector::zeros(3), cov).unwrap();
        let set = sigma_points(&b, &UkfParams::default()).unwrap();
        let (_, c) = set.reconstruct();
        assert!((c - &b.covariance).abs().max() < 1e-4);
    }
}

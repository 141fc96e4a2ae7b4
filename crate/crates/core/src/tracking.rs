//! Joint position and shape estimation.
//!
//! The state vector is `[p1, p2, p3, w_0^0, w_1^-1, w_1^0, w_1^1, ...]`: the
//! star point followed by the series coefficients in their linear order. Each
//! frame runs one prediction (random walk, or a known rotation applied to the
//! coefficients) and then one UKF update per measured point.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::harness::Frame;
use crate::sh::{coefficient_count, rotation_operator, BasisEvaluator, DegreeBlockRotation, Rotation3, ShCoefficients, SphericalDirection};
use crate::ukf::{self, GaussianBelief, UkfParams};
use crate::{Error, Result, Vec3};

/// Position and shape unpacked from a state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackState {
    pub position: Vec3,
    pub coefficients: ShCoefficients,
}

impl TrackState {
    pub fn pack(&self) -> DVector<f64> {
        let w = self.coefficients.weights();
        DVector::from_iterator(3 + w.len(), self.position.iter().chain(w).copied())
    }

    pub fn unpack(x: &DVector<f64>) -> Result<Self> {
        if x.len() < 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: x.len(),
            });
        }
        Ok(Self {
            position: Vec3::new(x[0], x[1], x[2]),
            coefficients: ShCoefficients::from_weights(x.as_slice()[3..].to_vec())?,
        })
    }
}

/// A known per-step rotation of the object about an axis through its star point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationInput {
    pub axis: [f64; 3],
    /// Radians per time step.
    pub rate: f64,
}

impl RotationInput {
    pub fn new(axis: Vec3, rate: f64) -> Result<Self> {
        let n = axis.norm();
        if !(n.is_finite() && n > 0.0 && rate.is_finite()) {
            return Err(Error::Config(format!("invalid rotation input ({axis:?}, {rate})")));
        }
        let u = axis / n;
        Ok(Self {
            axis: [u.x, u.y, u.z],
            rate,
        })
    }

    pub fn rotation(&self) -> Result<Rotation3> {
        Rotation3::from_axis_angle(&Vec3::from(self.axis), self.rate)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Series degree `L`.
    pub degree: usize,
    pub position_process_std: f64,
    /// Per-step noise on every coefficient.
    pub coefficient_process_std: f64,
    /// Isotropic measurement noise standard deviation.
    pub measurement_std: f64,
    /// Radius of the initial sphere.
    pub initial_radius: f64,
    pub initial_position_std: f64,
    /// Initial standard deviation of `w_0^0`.
    pub initial_radius_coefficient_std: f64,
    /// Initial standard deviation of every coefficient with `l >= 1`.
    pub initial_coefficient_std: f64,
    pub ukf: UkfParams,
    /// Known rotation applied to the coefficients at each prediction.
    pub motion_model: Option<RotationInput>,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            degree: 8,
            position_process_std: 0.01,
            coefficient_process_std: 0.001,
            measurement_std: 0.1,
            initial_radius: 1.0,
            initial_position_std: 0.3,
            initial_radius_coefficient_std: 1.0,
            initial_coefficient_std: 0.3,
            ukf: UkfParams::default(),
            motion_model: None,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let stds = [
            ("position_process_std", self.position_process_std),
            ("coefficient_process_std", self.coefficient_process_std),
            ("measurement_std", self.measurement_std),
            ("initial_radius", self.initial_radius),
            ("initial_position_std", self.initial_position_std),
            ("initial_radius_coefficient_std", self.initial_radius_coefficient_std),
            ("initial_coefficient_std", self.initial_coefficient_std),
        ];
        if let Some((name, v)) = stds.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("{name} must be positive, got {v}")));
        }
        self.ukf.validate(self.state_dim())?;
        if let Some(m) = &self.motion_model {
            RotationInput::new(Vec3::from(m.axis), m.rate)?;
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        3 + coefficient_count(self.degree)
    }

    pub fn process_noise(&self) -> DMatrix<f64> {
        let n = self.state_dim();
        let (pv, cv) = (self.position_process_std.powi(2), self.coefficient_process_std.powi(2));
        DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| if i < 3 { pv } else { cv }))
    }

    pub fn measurement_noise(&self) -> DMatrix<f64> {
        DMatrix::identity(3, 3) * self.measurement_std.powi(2)
    }
}

/// Random-walk system model: the state is carried over unchanged.
pub fn system_random_walk(x: &DVector<f64>) -> DVector<f64> {
    x.clone()
}

/// Known-rotation system model: position unchanged, coefficients rotated.
pub fn system_rotation(x: &DVector<f64>, op: &DegreeBlockRotation) -> Result<DVector<f64>> {
    let mut out = x.clone();
    op.apply_in_place(&mut out.as_mut_slice()[3..])?;
    Ok(out)
}

/// Greedy association: the source of measurement `y` is the surface point on
/// the ray from the star point through `y`.
///
/// Returns `None` when `y` coincides with the star point.
pub fn gam_measurement_fn(x: &DVector<f64>, y: &Vec3, eval: &mut BasisEvaluator) -> Option<Vec3> {
    let p = Vec3::new(x[0], x[1], x[2]);
    let z = y - p;
    let norm = z.norm();
    if norm < 1e-9 {
        return None;
    }
    let dir = SphericalDirection::from_vector(&z);
    Some(p + z * (eval.series(&x.as_slice()[3..], &dir) / norm))
}

/// Star point at the centroid of the first frame; sphere of radius `r0`;
/// diagonal covariance from the configured standard deviations.
pub fn initialize_belief(first_frame: &Frame, config: &TrackerConfig) -> Result<GaussianBelief> {
    config.validate()?;
    let finite: Vec<&Vec3> = first_frame.points.iter().filter(|p| p.iter().all(|c| c.is_finite())).collect();
    if finite.is_empty() {
        return Err(Error::EmptyFrame);
    }
    let centroid = finite.iter().fold(Vec3::zeros(), |acc, p| acc + *p) / finite.len() as f64;
    let state = TrackState {
        position: centroid,
        coefficients: ShCoefficients::sphere(config.initial_radius, config.degree),
    };
    let n = config.state_dim();
    let variances = DVector::from_fn(n, |i, _| match i {
        0..=2 => config.initial_position_std.powi(2),
        3 => config.initial_radius_coefficient_std.powi(2),
        _ => config.initial_coefficient_std.powi(2),
    });
    GaussianBelief::new(state.pack(), DMatrix::from_diagonal(&variances))
}

/// Result of processing one frame.
#[derive(Debug, Clone)]
pub struct FrameOutcome {
    pub belief: GaussianBelief,
    /// Measurements skipped because they coincided with the star point or
    /// produced a singular innovation.
    pub skipped: usize,
    /// Measurements with non-finite coordinates.
    pub rejected: usize,
}

/// One prediction followed by sequential per-point updates.
pub fn process_frame(
    belief: &GaussianBelief,
    frame: &Frame,
    config: &TrackerConfig,
    motion: Option<&RotationInput>,
) -> Result<FrameOutcome> {
    let op = motion
        .map(|m| m.rotation().map(|r| rotation_operator(&r, config.degree)))
        .transpose()?;
    process_points(belief, &frame.points, config, op.as_ref())
}

fn process_points(
    belief: &GaussianBelief,
    points: &[Vec3],
    config: &TrackerConfig,
    rotation: Option<&DegreeBlockRotation>,
) -> Result<FrameOutcome> {
    if belief.dim() != config.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: config.state_dim(),
            found: belief.dim(),
        });
    }
    let q = config.process_noise();
    let mut current = match rotation {
        Some(op) => {
            let mut failure = None;
            let predicted = ukf::predict(
                belief,
                |x| {
                    system_rotation(x, op).unwrap_or_else(|e| {
                        failure = Some(e);
                        x.clone()
                    })
                },
                &q,
                &config.ukf,
            )?;
            if let Some(e) = failure {
                return Err(e);
            }
            predicted
        }
        None => ukf::predict(belief, system_random_walk, &q, &config.ukf)?,
    };

    let r = config.measurement_noise();
    let mut eval = BasisEvaluator::new(config.degree);
    let (mut skipped, mut rejected) = (0, 0);
    for y in points {
        if !y.iter().all(|c| c.is_finite()) {
            rejected += 1;
            continue;
        }
        let mean = &current.mean;
        if (y - Vec3::new(mean[0], mean[1], mean[2])).norm() < 1e-9 {
            skipped += 1;
            continue;
        }
        let target = DVector::from_column_slice(y.as_slice());
        let result = ukf::update(
            &current,
            |x| match gam_measurement_fn(x, y, &mut eval) {
                Some(s) => DVector::from_column_slice(s.as_slice()),
                None => DVector::from_element(3, f64::NAN),
            },
            &target,
            &r,
            &config.ukf,
        );
        match result {
            Ok(b) => current = b,
            Err(Error::NonFinite(_) | Error::SingularInnovation) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(FrameOutcome {
        belief: current,
        skipped,
        rejected,
    })
}

/// Stateful wrapper that caches the rotation operator between frames.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    rotation: Option<DegreeBlockRotation>,
    belief: GaussianBelief,
}

impl Tracker {
    /// Initializes from the first frame; the frame itself is not yet processed.
    pub fn new(config: TrackerConfig, first_frame: &Frame) -> Result<Self> {
        let belief = initialize_belief(first_frame, &config)?;
        Self::from_belief(config, belief)
    }

    pub fn from_belief(config: TrackerConfig, belief: GaussianBelief) -> Result<Self> {
        config.validate()?;
        if belief.dim() != config.state_dim() {
            return Err(Error::DimensionMismatch {
                expected: config.state_dim(),
                found: belief.dim(),
            });
        }
        let rotation = config
            .motion_model
            .map(|m| m.rotation().map(|r| rotation_operator(&r, config.degree)))
            .transpose()?;
        Ok(Self { config, rotation, belief })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn belief(&self) -> &GaussianBelief {
        &self.belief
    }

    pub fn state(&self) -> TrackState {
        TrackState::unpack(&self.belief.mean).expect("belief dimension checked at construction")
    }

    /// Processes a frame and returns `(skipped, rejected)` counts.
    pub fn step(&mut self, frame: &Frame) -> Result<(usize, usize)> {
        let out = process_points(&self.belief, &frame.points, &self.config, self.rotation.as_ref())?;
        self.belief = out.belief;
        Ok((out.skipped, out.rejected))
    }
}

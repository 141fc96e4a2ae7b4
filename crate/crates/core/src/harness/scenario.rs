use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::export::{export_mesh, BeliefSnapshot};
use super::frame::{read_frames_dir, Frame};
use super::teapot::teapot_class_mesh;
use crate::geometry::{iou, load_mesh, sample_surface, Radial, StarConvexShape, VoxelGrid};
use crate::sh::{rotate_coefficients, rotation_operator, Rotation3};
use crate::tracking::{TrackState, Tracker, TrackerConfig};
use crate::{Error, Result, Vec3};

/// Ground-truth object, placed with its star point at the scenario centre.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroundTruth {
    Cuboid {
        half_extents: [f64; 3],
    },
    Sphere {
        radius: f64,
    },
    /// OBJ or ASCII PLY file. Relative paths resolve against the config file.
    Mesh {
        path: PathBuf,
        #[serde(default = "one")]
        scale: f64,
        /// Star point in mesh coordinates (before scaling); defaults to the
        /// bounding-box centre.
        #[serde(default)]
        star_point: Option<[f64; 3]>,
    },
    /// The built-in teapot-like mesh, 3.5 x 2.2 x 1.8 units.
    Teapot,
}

fn one() -> f64 {
    1.0
}

/// Ground-truth pose over time. Frame `k` shows the object rotated `k - 1`
/// times.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TruthMotion {
    #[default]
    Static,
    Rotation {
        axis: [f64; 3],
        /// Radians per step.
        rate: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub ground_truth: GroundTruth,
    #[serde(default)]
    pub center: [f64; 3],
    #[serde(default)]
    pub motion: TruthMotion,
    pub points_per_frame: usize,
    pub noise_variance: f64,
    pub frames: usize,
    pub seed: u64,
    #[serde(default)]
    pub tracker: TrackerConfig,
    /// Voxels per axis of the IoU grid; 0 disables IoU unless
    /// `iou_cell_size` is set.
    #[serde(default = "default_iou_resolution")]
    pub iou_resolution: usize,
    /// Relative bounding-box padding of the IoU grid.
    #[serde(default = "default_iou_padding")]
    pub iou_padding: f64,
    /// When set, IoU uses cells of this size on a lattice anchored at the
    /// ground truth's bounding-box corner instead of the padded grid.
    #[serde(default)]
    pub iou_cell_size: Option<[f64; 3]>,
}

fn default_iou_resolution() -> usize {
    128
}

fn default_iou_padding() -> f64 {
    0.05
}

impl ScenarioConfig {
    /// Parses TOML, or JSON when the extension is `.json`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            serde_json::from_str(&text)?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        if let GroundTruth::Mesh { path: mesh, .. } = &mut config.ground_truth {
            if mesh.is_relative() {
                if let Some(dir) = path.parent() {
                    *mesh = dir.join(&*mesh);
                }
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.points_per_frame == 0 || self.frames == 0 {
            return Err(Error::Config("points_per_frame and frames must be at least 1".into()));
        }
        if !(self.noise_variance.is_finite() && self.noise_variance >= 0.0) {
            return Err(Error::Config(format!(
                "noise_variance must be finite and >= 0, got {}",
                self.noise_variance
            )));
        }
        if !(self.iou_padding.is_finite() && self.iou_padding >= 0.0) {
            return Err(Error::Config(format!(
                "iou_padding must be finite and >= 0, got {}",
                self.iou_padding
            )));
        }
        if self.center.iter().any(|c| !c.is_finite()) {
            return Err(Error::Config("center must be finite".into()));
        }
        self.tracker.validate()
    }
}

/// A validated scenario with its ground truth built.
#[derive(Debug, Clone)]
pub struct Scenario {
    config: ScenarioConfig,
    truth: StarConvexShape,
    step_rotation: Option<Rotation3>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let center = Vec3::from(config.center);
        let truth = match &config.ground_truth {
            GroundTruth::Cuboid { half_extents } => StarConvexShape::cuboid(center, Vec3::from(*half_extents))?,
            GroundTruth::Sphere { radius } => StarConvexShape::sphere(center, *radius)?,
            GroundTruth::Mesh { path, scale, star_point } => {
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::Config(format!("mesh scale must be positive, got {scale}")));
                }
                let mesh = load_mesh(path)?;
                let star = match star_point {
                    Some(s) => Vec3::from(*s),
                    None => mesh.bounding_box().ok_or(Error::EmptyMesh)?.center(),
                };
                let placed = mesh.map_vertices(|v| (v - star) * *scale + center);
                StarConvexShape::mesh(center, placed)?
            }
            GroundTruth::Teapot => {
                let (mesh, star) = teapot_class_mesh();
                StarConvexShape::mesh(center, mesh.map_vertices(|v| v - star + center))?
            }
        };
        let step_rotation = match config.motion {
            TruthMotion::Static => None,
            TruthMotion::Rotation { axis, rate } => Some(Rotation3::from_axis_angle(&Vec3::from(axis), rate)?),
        };
        Ok(Self {
            config,
            truth,
            step_rotation,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    /// Ground truth at its initial pose.
    pub fn truth(&self) -> &StarConvexShape {
        &self.truth
    }

    /// Ground truth as seen in frame `k` (1-based).
    pub fn truth_at(&self, k: usize) -> Result<StarConvexShape> {
        let rot = match &self.step_rotation {
            Some(r) if k > 1 => r.powi((k - 1) as u32),
            _ => return Ok(self.truth.clone()),
        };
        let c = self.truth.star_point();
        match self.truth.radial_kind() {
            Radial::Sphere { .. } => Ok(self.truth.clone()),
            Radial::Cuboid { half_extents, orientation } => StarConvexShape::oriented_cuboid(c, *half_extents, rot.compose(orientation)),
            Radial::Mesh(mesh) => StarConvexShape::mesh(c, mesh.map_vertices(|v| c + rot.apply(&(v - c)))),
            Radial::Series(coeffs) => {
                let op = rotation_operator(&rot, coeffs.degree());
                Ok(StarConvexShape::series(c, rotate_coefficients(coeffs, &op)?))
            }
        }
    }

    /// The generator used for frame `k`: one ChaCha stream per frame, so any
    /// frame can be regenerated on its own.
    pub fn frame_rng(&self, k: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(k as u64);
        rng
    }

    pub fn frame(&self, k: usize) -> Result<Frame> {
        generate_frame(self, k, &mut self.frame_rng(k))
    }

    /// Metrics for the estimate after frame `k`: position error against the
    /// true star point, and IoU when a grid is configured.
    pub fn report(&self, k: usize, state: &TrackState, skipped: usize, rejected: usize) -> Result<StepReport> {
        let config = &self.config;
        let truth = self.truth_at(k)?;
        let mut report = StepReport::new(k, state, skipped, rejected);
        report.position_error = Some((state.position - truth.star_point()).norm());
        if config.iou_resolution > 0 || config.iou_cell_size.is_some() {
            let estimate = StarConvexShape::series(state.position, state.coefficients.clone());
            let grid = match config.iou_cell_size {
                Some(h) => VoxelGrid::lattice(&[&estimate, &truth], &truth.bounding_box().min, &Vec3::from(h))?,
                None => VoxelGrid::covering(&[&estimate, &truth], config.iou_resolution, config.iou_padding)?,
            };
            report.iou = Some(iou(&estimate, &truth, &grid)?);
        }
        Ok(report)
    }
}

/// Samples the pose-at-`k` ground truth surface and adds isotropic Gaussian
/// noise of the configured variance.
pub fn generate_frame<R: Rng + ?Sized>(scenario: &Scenario, k: usize, rng: &mut R) -> Result<Frame> {
    let truth = scenario.truth_at(k)?;
    let mut points = sample_surface(&truth, scenario.config.points_per_frame, rng)?;
    let var = scenario.config.noise_variance;
    if var > 0.0 {
        let normal = Normal::new(0.0, var.sqrt()).map_err(|e| Error::Config(e.to_string()))?;
        for p in &mut points {
            for c in p.iter_mut() {
                *c += normal.sample(rng);
            }
        }
    }
    Ok(Frame::new(k, points))
}

/// Per-step metrics, serialized as one JSON object per line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepReport {
    pub k: usize,
    pub iou: Option<f64>,
    pub position_error: Option<f64>,
    pub position: [f64; 3],
    pub coefficients: Vec<f64>,
    pub skipped: usize,
    pub rejected: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl StepReport {
    fn new(k: usize, state: &TrackState, skipped: usize, rejected: usize) -> Self {
        Self {
            k,
            iou: None,
            position_error: None,
            position: state.position.into(),
            coefficients: state.coefficients.weights().to_vec(),
            skipped,
            rejected,
            wall_time_ms: None,
        }
    }

    pub fn to_json_line(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }
}

/// Output options shared by simulation and replay.
#[derive(Debug, Clone)]
pub struct RunOptions {
    /// Record wall time per step. Off by default because it makes the
    /// metrics stream non-reproducible.
    pub timing: bool,
    /// Export the estimate as `mesh_%06d.obj` every this many steps.
    pub mesh_every: Option<usize>,
    pub mesh_dir: PathBuf,
    /// `(n_theta, n_phi)` of exported meshes.
    pub mesh_resolution: (usize, usize),
    /// Replay stops after this many frames.
    pub max_frames: Option<usize>,
    /// Where to save the final belief as JSON.
    pub state_out: Option<PathBuf>,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            timing: false,
            mesh_every: None,
            mesh_dir: PathBuf::from("."),
            mesh_resolution: (48, 96),
            max_frames: None,
            state_out: None,
        }
    }
}

/// Replay takes the same options as simulation.
pub type ReplayOptions = RunOptions;

impl RunOptions {
    fn maybe_export(&self, k: usize, state: &TrackState) -> Result<()> {
        match self.mesh_every {
            Some(every) if every > 0 && k.is_multiple_of(every) => {
                let path = self.mesh_dir.join(format!("mesh_{k:06}.obj"));
                export_mesh(&state.coefficients, &state.position, path, self.mesh_resolution)
            }
            _ => Ok(()),
        }
    }

    fn save_state(&self, tracker: &Tracker) -> Result<()> {
        match &self.state_out {
            Some(path) => BeliefSnapshot::from_belief(tracker.belief())?.save(path),
            None => Ok(()),
        }
    }
}

pub fn run_simulation(scenario: &Scenario) -> Result<Vec<StepReport>> {
    run_simulation_with(scenario, &RunOptions::default(), |_| Ok(()))
}

/// Initializes from frame 1 and then processes frames `1..=frames`, handing
/// each report to `sink` as soon as it is produced.
pub fn run_simulation_with(
    scenario: &Scenario,
    options: &RunOptions,
    mut sink: impl FnMut(&StepReport) -> Result<()>,
) -> Result<Vec<StepReport>> {
    let config = &scenario.config;
    let first = scenario.frame(1)?;
    let mut tracker = Tracker::new(config.tracker.clone(), &first)?;
    let mut reports = Vec::with_capacity(config.frames);
    for k in 1..=config.frames {
        let started = options.timing.then(Instant::now);
        let frame = if k == 1 { first.clone() } else { scenario.frame(k)? };
        let (skipped, rejected) = tracker.step(&frame).map_err(|e| step_error(k, e))?;
        let state = tracker.state();
        let mut report = scenario.report(k, &state, skipped, rejected)?;
        report.wall_time_ms = started.map(|t| t.elapsed().as_secs_f64() * 1e3);
        options.maybe_export(k, &state)?;
        log::debug!("step {k}: iou {:?}, skipped {skipped}", report.iou);
        sink(&report)?;
        reports.push(report);
    }
    options.save_state(&tracker)?;
    Ok(reports)
}

/// Runs the tracker over recorded frames. No ground truth, so IoU and
/// position error are absent.
pub fn replay(
    frames_dir: impl AsRef<Path>,
    tracker: &TrackerConfig,
    options: &ReplayOptions,
    mut sink: impl FnMut(&StepReport) -> Result<()>,
) -> Result<Vec<StepReport>> {
    let mut frames = read_frames_dir(frames_dir)?;
    if let Some(n) = options.max_frames {
        frames.truncate(n.max(1));
    }
    let mut tr = Tracker::new(tracker.clone(), &frames[0])?;
    let mut reports = Vec::with_capacity(frames.len());
    for frame in &frames {
        let started = options.timing.then(Instant::now);
        let (skipped, rejected) = tr.step(frame).map_err(|e| step_error(frame.k, e))?;
        let state = tr.state();
        let mut report = StepReport::new(frame.k, &state, skipped, rejected);
        report.wall_time_ms = started.map(|t| t.elapsed().as_secs_f64() * 1e3);
        options.maybe_export(frame.k, &state)?;
        sink(&report)?;
        reports.push(report);
    }
    options.save_state(&tr)?;
    Ok(reports)
}

fn step_error(step: usize, source: Error) -> Error {
    Error::Step {
        step,
        source: Box::new(source),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sphere_config(variance: f64) -> ScenarioConfig {
        ScenarioConfig {
            ground_truth: GroundTruth::Sphere { radius: 1.5 },
            center: [1.0, -2.0, 0.5],
            motion: TruthMotion::Static,
            points_per_frame: 200,
            noise_variance: variance,
            frames: 3,
            seed: 7,
            tracker: TrackerConfig::default(),
            iou_resolution: 0,
            iou_padding: 0.05,
            iou_cell_size: None,
        }
    }

    #[test]
    fn noiseless_sphere_points_on_surface() {
        let s = Scenario::new(sphere_config(0.0)).unwrap();
        let f = s.frame(2).unwrap();
        assert_eq!(f.points.len(), 200);
        for p in &f.points {
            assert!(((p - Vec3::new(1.0, -2.0, 0.5)).norm() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn frames_reproducible_and_distinct() {
        let s = Scenario::new(sphere_config(1e-2)).unwrap();
        assert_eq!(s.frame(4).unwrap(), s.frame(4).unwrap());
        assert_ne!(s.frame(4).unwrap().points, s.frame(5).unwrap().points);
    }

    #[test]
    fn toml_config_parses() {
        let text = r#"
            points_per_frame = 60
            noise_variance = 0.01
            frames = 20
            seed = 1
            [ground_truth]
            kind = "cuboid"
            half_extents = [1.5, 0.5, 0.5]
            [motion]
            kind = "rotation"
            axis = [0.0, 0.0, 1.0]
            rate = 0.1745
            [tracker]
            degree = 4
        "#;
        let c: ScenarioConfig = toml::from_str(text).unwrap();
        assert_eq!(c.tracker.degree, 4);
        assert_eq!(c.iou_resolution, 128);
        assert!(matches!(c.motion, TruthMotion::Rotation { .. }));
        assert!(toml::from_str::<ScenarioConfig>(&format!("{text}\nbogus = 1")).is_err());
    }

    #[test]
    fn invalid_counts_rejected() {
        let mut c = sphere_config(0.0);
        c.frames = 0;
        assert!(matches!(Scenario::new(c), Err(Error::Config(_))));
        let mut c = sphere_config(-1.0);
        c.frames = 1;
        assert!(Scenario::new(c).is_err());
    }

    #[test]
    fn rotating_truth_follows_schedule() {
        let mut c = sphere_config(0.0);
        c.ground_truth = GroundTruth::Cuboid {
            half_extents: [1.5, 0.5, 0.5],
        };
        c.motion = TruthMotion::Rotation {
            axis: [0.0, 0.0, 1.0],
            rate: std::f64::consts::FRAC_PI_2,
        };
        let s = Scenario::new(c).unwrap();
        let center = Vec3::new(1.0, -2.0, 0.5);
        assert!(s.truth_at(1).unwrap().contains(&(center + Vec3::new(1.4, 0.0, 0.0))));
        let t2 = s.truth_at(2).unwrap();
        assert!(t2.contains(&(center + Vec3::new(0.0, 1.4, 0.0))));
        assert!(!t2.contains(&(center + Vec3::new(1.4, 0.0, 0.0))));
    }
}

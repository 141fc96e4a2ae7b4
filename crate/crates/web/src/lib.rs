//! Browser bindings for the shapetrack demo page in `www/`.
//!
//! Three operations: a heatmap of one real basis function, a least-squares
//! series fit of a cuboid, and a tracking run that advances one frame at a
//! time. Everything returns plain numbers, arrays or JSON strings so the same
//! functions run in native tests.

use shapetrack::geometry::{cuboid_radial, iou, tessellate, StarConvexShape, TriangleMesh, VoxelGrid};
use shapetrack::harness::{Scenario, ScenarioConfig};
use shapetrack::sh::{fit_coefficients, real_basis, ShCoefficients, SphereQuadrature, SphericalDirection};
use shapetrack::tracking::Tracker;
use shapetrack::Vec3;
use wasm_bindgen::prelude::*;

const MAX_DEGREE: u32 = 20;

/// Values of `S_l^m` on an equirectangular grid, row-major from the north
/// pole, `height` rows by `width` columns of cell centres.
#[wasm_bindgen]
pub fn basis_heatmap(l: u32, m: i32, width: u32, height: u32) -> Result<Vec<f32>, String> {
    if l > MAX_DEGREE {
        return Err(format!("degree {l} is above the demo limit {MAX_DEGREE}"));
    }
    if width == 0 || height == 0 {
        return Err("heatmap needs at least one pixel".into());
    }
    let mut out = Vec::with_capacity((width * height) as usize);
    for row in 0..height {
        let theta = std::f64::consts::PI * (row as f64 + 0.5) / height as f64;
        for col in 0..width {
            let phi = std::f64::consts::TAU * (col as f64 + 0.5) / width as f64;
            let dir = SphericalDirection::new(theta, phi).map_err(|e| e.to_string())?;
            out.push(real_basis(l as usize, m as i64, &dir).map_err(|e| e.to_string())? as f32);
        }
    }
    Ok(out)
}

/// Triangle mesh in flat arrays for WebGL or canvas drawing.
#[wasm_bindgen]
pub struct MeshData {
    positions: Vec<f32>,
    indices: Vec<u32>,
    iou: f64,
}

#[wasm_bindgen]
impl MeshData {
    /// `x, y, z` per vertex.
    #[wasm_bindgen(getter)]
    pub fn positions(&self) -> Vec<f32> {
        self.positions.clone()
    }

    /// Three vertex indices per triangle, counter-clockwise seen from outside.
    #[wasm_bindgen(getter)]
    pub fn indices(&self) -> Vec<u32> {
        self.indices.clone()
    }

    /// IoU against the reference shape, or NaN when there is none.
    #[wasm_bindgen(getter)]
    pub fn iou(&self) -> f64 {
        self.iou
    }
}

impl MeshData {
    fn new(mesh: &TriangleMesh, iou: f64) -> Self {
        Self {
            positions: mesh.vertices().iter().flat_map(|v| v.iter().map(|&c| c as f32)).collect(),
            indices: mesh.triangles().iter().flatten().map(|&i| i as u32).collect(),
            iou,
        }
    }
}

/// Projects the radial function of a centred cuboid onto degree `degree` and
/// tessellates the result. The IoU is measured on a 48-cell grid.
#[wasm_bindgen]
pub fn fit_cuboid(hx: f64, hy: f64, hz: f64, degree: u32, n_theta: u32, n_phi: u32) -> Result<MeshData, String> {
    if degree > MAX_DEGREE {
        return Err(format!("degree {degree} is above the demo limit {MAX_DEGREE}"));
    }
    let half = Vec3::new(hx, hy, hz);
    let truth = StarConvexShape::cuboid(Vec3::zeros(), half).map_err(|e| e.to_string())?;
    let degree = degree as usize;
    let quad = SphereQuadrature::exact_to(2 * degree + 16);
    let coeffs =
        fit_coefficients(|d: &SphericalDirection| cuboid_radial(&half, &d.unit_vector()), degree, &quad).map_err(|e| e.to_string())?;
    let mesh = tessellate(&coeffs, &Vec3::zeros(), n_theta as usize, n_phi as usize).map_err(|e| e.to_string())?;
    let estimate = StarConvexShape::series(Vec3::zeros(), coeffs);
    let grid = VoxelGrid::covering(&[&estimate, &truth], 48, 0.05).map_err(|e| e.to_string())?;
    let overlap = iou(&estimate, &truth, &grid).map_err(|e| e.to_string())?;
    Ok(MeshData::new(&mesh, overlap))
}

/// A simulated scenario driven one frame per call.
#[wasm_bindgen]
pub struct TrackingDemo {
    scenario: Scenario,
    tracker: Option<Tracker>,
    k: usize,
    points: Vec<Vec3>,
}

#[wasm_bindgen]
impl TrackingDemo {
    /// Takes a scenario config as JSON (same fields as the config files).
    /// Mesh files cannot be loaded in the browser; use the built-in shapes.
    #[wasm_bindgen(constructor)]
    pub fn new(config_json: &str) -> Result<TrackingDemo, String> {
        let config: ScenarioConfig = serde_json::from_str(config_json).map_err(|e| e.to_string())?;
        let scenario = Scenario::new(config).map_err(|e| e.to_string())?;
        Ok(Self {
            scenario,
            tracker: None,
            k: 0,
            points: Vec::new(),
        })
    }

    /// Processes the next frame and returns its metrics as JSON.
    pub fn step(&mut self) -> Result<String, String> {
        let k = self.k + 1;
        let frame = self.scenario.frame(k).map_err(|e| e.to_string())?;
        let tracker = match &mut self.tracker {
            Some(t) => t,
            None => {
                let t = Tracker::new(self.scenario.config().tracker.clone(), &frame).map_err(|e| e.to_string())?;
                self.tracker.insert(t)
            }
        };
        let (skipped, rejected) = tracker.step(&frame).map_err(|e| e.to_string())?;
        let report = self
            .scenario
            .report(k, &tracker.state(), skipped, rejected)
            .map_err(|e| e.to_string())?;
        self.k = k;
        self.points = frame.points;
        report.to_json_line().map_err(|e| e.to_string())
    }

    /// Frames processed so far.
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> u32 {
        self.k as u32
    }

    /// Measurements of the last frame, `x, y, z` per point.
    pub fn points(&self) -> Vec<f32> {
        self.points.iter().flat_map(|p| p.iter().map(|&c| c as f32)).collect()
    }

    /// Current estimate as a mesh; before the first step, the initial sphere
    /// at the origin.
    pub fn estimate_mesh(&self, n_theta: u32, n_phi: u32) -> Result<MeshData, String> {
        let (coeffs, star) = match &self.tracker {
            Some(t) => {
                let s = t.state();
                (s.coefficients, s.position)
            }
            None => {
                let c = &self.scenario.config().tracker;
                (ShCoefficients::sphere(c.initial_radius, c.degree), Vec3::zeros())
            }
        };
        let mesh = tessellate(&coeffs, &star, n_theta as usize, n_phi as usize).map_err(|e| e.to_string())?;
        Ok(MeshData::new(&mesh, f64::NAN))
    }
}

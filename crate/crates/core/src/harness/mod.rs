//! Simulation scenarios, recorded-frame replay and mesh export.

mod export;
mod frame;
mod scenario;
mod teapot;

pub use export::{export_mesh, BeliefSnapshot};
pub use frame::{frame_file_name, read_frame_file, read_frames_dir, write_frame_file, Frame};
pub use scenario::{
    generate_frame, replay, run_simulation, run_simulation_with, GroundTruth, ReplayOptions, RunOptions, Scenario, ScenarioConfig,
    StepReport, TruthMotion,
};
pub use teapot::teapot_class_mesh;

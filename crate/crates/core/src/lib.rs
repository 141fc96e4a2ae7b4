//! Simultaneous pose and shape estimation of three-dimensional extended objects.
//!
//! Shapes are star-convex: a radial function maps every direction seen from the
//! star point to the distance of the boundary. The radial function is a truncated
//! real spherical-harmonics series, and an unscented Kalman filter estimates the
//! star point together with the series coefficients from noisy surface points.
//!
//! Module map:
//!
//! - [`sh`]: real and complex spherical-harmonic bases, series evaluation,
//!   quadrature fitting and per-degree rotation of coefficient vectors.
//! - [`geometry`]: coordinate conversion, star-convex shapes and analytic
//!   primitives, triangle meshes, surface sampling, tessellation and voxel IoU.
//! - [`ukf`]: a generic additive-noise unscented Kalman filter.
//! - [`tracking`]: the joint position/coefficient state, system models and the
//!   greedy-association measurement model.
//! - [`harness`]: scenario simulation, recorded-frame replay and mesh export.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod sh;
pub mod tracking;
pub mod ukf;

pub use error::{Error, Result};

/// Cartesian 3-vector used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;

//! Real spherical harmonics: basis evaluation, series, fitting and rotation.
//!
//! Basis functions follow the convention without the Condon–Shortley phase in
//! the associated Legendre functions; the `(-1)^m` sign lives in the complex
//! basis. Coefficient vectors are laid out by `l^2 + l + m`.

mod basis;
mod coeffs;
mod legendre;
mod quadrature;
mod rotation;

pub use basis::{complex_basis, real_basis, BasisEvaluator, SphericalDirection};
pub use coeffs::{coefficient_count, coefficient_index, eval_series, ShCoefficients};
pub use legendre::{assoc_legendre, NormalizedLegendre};
pub use quadrature::{fit_coefficients, gauss_legendre, SphereQuadrature};
pub use rotation::{rotate_coefficients, rotation_operator, DegreeBlockRotation, Rotation3};

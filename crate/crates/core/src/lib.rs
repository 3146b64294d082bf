//! Radial pseudospectral solver and estimate workbench for the 3D
//! fractional Schrödinger equation with a cubic Hartree nonlinearity
//!
//! ```text
//! -i u_t + (-Delta)^{alpha/2} u = sigma (|x|^{-alpha} * |u|^2) u,   x in R^3.
//! ```

pub mod dynamics;
pub mod error;
pub mod estimates;
pub mod field;
pub mod grid;
pub mod illposed;
pub mod littlewood_paley;
pub mod multiplier;
pub mod norms;
pub mod params;
pub mod quad;
pub mod regression;
pub mod riesz;
pub mod special;
pub mod transform;

pub use error::{Error, Result};
pub use field::{RadialField, SpectralField};
pub use grid::RadialGrid;
pub use littlewood_paley::{build_bump, project, project_gt, project_leq, project_tilde, BumpFamily, DyadicIndex};
pub use multiplier::apply_fractional_laplacian_power;
pub use norms::{l2_norm, mass, plancherel_norm, sobolev_norm};
pub use params::ModelParams;
pub use riesz::{riesz_convolution, RieszKernel};
pub use transform::{forward_transform, inverse_transform};

//! Pseudospectral laboratory for the generalized Benjamin–Ono equation
//! `∂_t u + H∂_x²u ± u^k ∂_x u = 0` on a large periodic box.
//!
//! Modules, bottom up:
//! - [`spectral`]: grids, fields, the discrete Fourier pair, Fourier
//!   multipliers and dealiased products.
//! - [`littlewood_paley`]: dyadic blocks, paraproduct and remainder.
//! - [`norms`]: mixed space-time, Sobolev and Besov norms.
//! - [`evolution`]: integrating-factor RK4 solvers and Duhamel quadrature.
//! - [`gauge`]: the localized gauge transform.
//! - [`lab`]: scaling, linear-estimate, smallness and Picard experiments.
//! - [`io`]: configuration, snapshot files and reports.

pub mod error;
pub mod evolution;
pub mod gauge;
pub mod io;
pub mod lab;
pub mod littlewood_paley;
pub mod norms;
pub mod spectral;
pub mod trajectory;
pub mod util;

pub use error::{Error, Result};
pub use spectral::{Field, SpectralField, SpectralGrid};
pub use trajectory::Trajectory;

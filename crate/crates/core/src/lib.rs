//! Mean spectral measure of the random Jacobi matrix obtained as the
//! high-temperature limit of Gaussian beta ensembles.
//!
//! * [`ratpoly`]: exact rational polynomials.
//! * [`moments`]: even moments `u_n(alpha)` and exact identities against the
//!   tridiagonal beta-ensemble model.
//! * [`special`]: closed-form density through Kummer functions, with
//!   quadrature cross-checks.
//! * [`linalg`]: spectral measure of a finite Jacobi matrix.
//! * [`sampler`]: random tridiagonal matrices and Monte Carlo estimates.

pub mod error;
pub mod linalg;
pub mod moments;
pub mod quadrature;
pub mod ratpoly;
pub mod sampler;
pub mod special;

pub use error::{Error, Result};

//! Compatibility analysis of smooth initial velocity fields for the
//! incompressible Navier–Stokes equations in a periodic channel.
//!
//! Fields live in the single-phase family
//! `u_k = sum_j a_{k,j}(y) cos(j theta) + b_{k,j}(y) sin(j theta)`,
//! `theta = alpha x + beta z`, with Chebyshev collocation in `y`.

pub mod compat;
pub mod error;
pub mod fieldops;
pub mod io;
pub mod modes;
pub mod oracle;
pub mod poisson;
pub mod search;
pub mod spectral;

pub use error::{Error, Result};

/// Library version embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

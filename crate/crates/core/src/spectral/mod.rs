//! Chebyshev collocation in the wall-normal direction and harmonic algebra
//! in the phase `theta = alpha*x + beta*z`.

mod field;
mod grid;
mod poly;
mod profile;

pub use field::{harmonic_product, FlowParams, Harmonic, ScalarField, WaveField};
pub use grid::{build_grid, ChebGrid, MIN_POINTS};
pub use poly::Poly;
pub use profile::YProfile;

/// Grid size used when none is requested.
pub const DEFAULT_POINTS: usize = 64;

use thiserror::Error;

use crate::compat::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// A pure-Neumann problem whose data do not satisfy the integral constraint.
    #[error("Neumann solvability violated: residual {residual:e} (relative {relative:e})")]
    Solvability { residual: f64, relative: f64 },

    #[error("inadmissible field: {}", format_violations(.0))]
    Inadmissible(Vec<Violation>),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("field file: {0}")]
    FieldFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

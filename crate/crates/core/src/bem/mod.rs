//! Discretisation of the single-layer operator `(Aσ)(s) = ∫_S σ(t) / (4π|s − t|) dt`
//! with piecewise-constant densities on flat triangular panels.

mod assembly;
mod dump;
mod potential;
mod quadrature;
mod spd;

use thiserror::Error;

pub use assembly::{assemble, assemble_with, AssemblyOptions, GalerkinSystem};
pub use dump::{read_matrix_dump, write_matrix_dump, DumpSidecar};
pub use potential::{triangle_potential, TrianglePotential};
pub use quadrature::{QuadratureRule, DEFAULT_ORDER};
pub use spd::{spd_check, SpdReport, SPD_MAX_ITERATIONS, SPD_TOLERANCE};

#[derive(Debug, Error)]
pub enum BemError {
    #[error("degenerate triangle (area {area:e})")]
    DegenerateTriangle { area: f64 },
    #[error("panel {panel} is degenerate (area {area:e})")]
    DegeneratePanel { panel: usize, area: f64 },
    #[error("invalid quadrature rule: {0}")]
    InvalidRule(String),
    #[error("system has no panels")]
    EmptySystem,
    #[error("non-finite matrix entry for panel pair ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

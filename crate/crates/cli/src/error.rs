use std::path::PathBuf;

use capvar::bem::BemError;
use capvar::capacitance::CapacitanceError;
use capvar::geometry::MeshError;
use capvar::varprinciple::PrincipleError;
use serde_json::{json, Value};
use thiserror::Error;

/// Process exit codes. Every failure maps to exactly one of these.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    /// Bug or broken internal invariant.
    pub const INTERNAL: i32 = 1;
    /// Bad flags or flag combinations (also used by the argument parser).
    pub const USAGE: i32 = 2;
    /// Mesh could not be built, parsed or validated.
    pub const MESH: i32 = 3;
    /// A file could not be read or written.
    pub const IO: i32 = 4;
    /// Assembly failed or the system is not positive definite.
    pub const NUMERICAL: i32 = 5;
    /// The linear solver failed.
    pub const SOLVER: i32 = 6;
    /// Matrix-mode input is malformed or not symmetric.
    pub const MATRIX_INPUT: i32 = 7;
    /// verify-principle observed behaviour that contradicts the
    /// classification.
    pub const INCONSISTENT: i32 = 8;
}

pub const ERROR_SCHEMA: &str = "caperror/1";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{source}")]
    Mesh {
        #[source]
        source: MeshError,
        path: Option<PathBuf>,
    },
    #[error("{path}: {source}")]
    Io {
        #[source]
        source: std::io::Error,
        path: PathBuf,
    },
    #[error(transparent)]
    Bem(#[from] BemError),
    #[error("the Galerkin matrix is not positive definite (min eigenvalue estimate {min_eigenvalue:e})")]
    NotSpd { min_eigenvalue: f64 },
    #[error(transparent)]
    Capacitance(#[from] CapacitanceError),
    #[error(transparent)]
    Principle(#[from] PrincipleError),
    #[error("observed behaviour contradicts the classification `{classification}`")]
    Inconsistent { classification: String },
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Self::Io { source, path }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::Principle(PrincipleError::InvalidArgument(_)) => exit::USAGE,
            Self::Mesh { source: MeshError::Io(_), .. } | Self::Io { .. } => exit::IO,
            Self::Mesh { .. } => exit::MESH,
            Self::Bem(BemError::Io(_)) => exit::IO,
            Self::Bem(BemError::DegenerateTriangle { .. } | BemError::DegeneratePanel { .. } | BemError::EmptySystem) => {
                exit::MESH
            }
            Self::Bem(_) | Self::NotSpd { .. } => exit::NUMERICAL,
            Self::Capacitance(CapacitanceError::NotPositiveDefinite) => exit::NUMERICAL,
            Self::Capacitance(_) => exit::SOLVER,
            Self::Principle(PrincipleError::EigenFailure | PrincipleError::Inconsistent(_)) => exit::INTERNAL,
            Self::Principle(_) => exit::MATRIX_INPUT,
            Self::Inconsistent { .. } => exit::INCONSISTENT,
            Self::Internal(_) => exit::INTERNAL,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Usage(_) | Self::Principle(PrincipleError::InvalidArgument(_)) => "usage",
            Self::Mesh { source: MeshError::NotWatertight { .. }, .. } => "mesh-not-watertight",
            Self::Mesh { source: MeshError::Io(_), .. } | Self::Io { .. } | Self::Bem(BemError::Io(_)) => "io",
            Self::Mesh { .. } => "mesh-invalid",
            Self::Bem(_) => "assembly",
            Self::NotSpd { .. } | Self::Capacitance(CapacitanceError::NotPositiveDefinite) => "not-positive-definite",
            Self::Capacitance(_) => "solver",
            Self::Principle(_) if self.exit_code() == exit::MATRIX_INPUT => "matrix-input",
            Self::Principle(_) => "internal",
            Self::Inconsistent { .. } => "principle-inconsistent",
            Self::Internal(_) => "internal",
        }
    }

    /// The diagnostic object written to stderr on failure.
    pub fn to_json(&self) -> Value {
        let mut error = json!({
            "kind": self.kind(),
            "exitCode": self.exit_code(),
            "message": self.to_string(),
        });
        match self {
            Self::Mesh { source, path } => {
                if let Some(p) = path {
                    error["path"] = json!(p.display().to_string());
                }
                if let MeshError::NotWatertight {
                    boundary_edges,
                    nonmanifold_edges,
                } = source
                {
                    error["boundaryEdges"] = json!(boundary_edges);
                    error["nonmanifoldEdges"] = json!(nonmanifold_edges);
                }
            }
            Self::Io { path, .. } => error["path"] = json!(path.display().to_string()),
            Self::NotSpd { min_eigenvalue } => error["minEigenvalue"] = json!(min_eigenvalue),
            _ => {}
        }
        json!({ "schema": ERROR_SCHEMA, "error": error })
    }
}

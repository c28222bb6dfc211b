//! Error types shared across the crate.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Gl3Error {
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: i64, dim: usize },

    #[error("matrix is not special orthogonal (defect {defect:.3e})")]
    NonOrthogonal { defect: f64 },

    #[error("singular matrix in decomposition")]
    SingularMatrix,

    #[error("gamma function pole at {z}")]
    GammaPole { z: Complex64 },

    #[error("intertwining matrix has a pole at mu difference {diff}")]
    IntertwinerPole { diff: Complex64 },

    #[error("contour violation: sigma = {sigma:?} does not clear pole at {pole}")]
    ContourViolation { sigma: [f64; 2], pole: f64 },

    #[error("quadrature failed to converge (last change {change:.3e})")]
    NonConvergent { change: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spectral parameter too close to a classification boundary (distance {dist:.3e})")]
    AmbiguousClassification { dist: f64 },

    #[error("surd addition with mismatched radicands {a} and {b}")]
    RadicandMismatch { a: String, b: String },

    #[error("vector is not annihilated by the lowering maps (residual {residual:.3e})")]
    NotMinimal { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Gl3Error>;

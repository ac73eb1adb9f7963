use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element is not in m: lambda component is {lambda:e}")]
    NotInM { lambda: f64 },

    #[error("matrix is not anti-Hermitian (residual {residual:e})")]
    NotAntiHermitian { residual: f64 },

    #[error("block {block} is not {expected} (residual {residual:e})")]
    BlockShape {
        block: &'static str,
        expected: &'static str,
        residual: f64,
    },

    #[error("metric is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("vectors do not span a 2-plane (normalized Gram determinant {gram:e})")]
    DegeneratePlane { gram: f64 },

    #[error("pair does not commute (|[x,y]| = {residual:e})")]
    NotCommuting { residual: f64 },

    #[error("series inverse needs a nonzero constant term, got {c0:e}")]
    SingularJet { c0: f64 },

    #[error("classification failed: {0}")]
    Classification(String),

    #[error("eigen decomposition failed: {0}")]
    Eigen(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

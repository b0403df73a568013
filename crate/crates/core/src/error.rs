use num_complex::Complex64;
use thiserror::Error;

/// Errors raised anywhere in the numerics pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point {point} lies outside the domain")]
    OutsideDomain { point: Complex64 },

    #[error("indeterminate membership for {point}: conformal inversion did not converge (last step {last_step:.3e})")]
    IndeterminateMembership { point: Complex64, last_step: f64 },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("argument {name} = {value} is outside its admissible range ({expected})")]
    DomainArgument { name: &'static str, value: f64, expected: &'static str },

    #[error("profile invariant violated: {0}")]
    ProfileInvariant(String),

    #[error("weight invariant violated: {0}")]
    WeightInvariant(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("quadrature failed to converge on [{a}, {b}]: estimated error {estimate:.3e} after {intervals} intervals")]
    QuadratureFailure { a: f64, b: f64, estimate: f64, intervals: usize },

    #[error("Gram matrix is not positive definite (smallest eigenvalue {min_eig:.3e}); refine the quadrature")]
    IndefiniteGram { min_eig: f64 },

    #[error("singular least-norm solve: {0}")]
    SingularSolve(String),

    #[error("least-norm extension did not stabilise: relative change {rel_change:.3e} at degree {degree}")]
    NotStabilised { degree: usize, rel_change: f64 },

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("envelope solver did not converge: sup-change {final_change:.3e} after {sweeps} sweeps")]
    NonConvergence { sweeps: usize, final_change: f64 },

    #[error("non-finite value encountered in {0}")]
    Numeric(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn in_stage(self, stage: &'static str) -> Error {
        match self {
            Error::Stage { .. } => self,
            other => Error::Stage { stage, source: Box::new(other) },
        }
    }

    /// Innermost error, looking through stage tags.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

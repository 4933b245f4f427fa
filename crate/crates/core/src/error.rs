use thiserror::Error;

/// Errors produced by the frame, dual, sampling and recovery routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    UnsupportedOrder { order: usize, max: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error(
        "pre-Gramian is ill-conditioned at frequency {frequency}: \
         condition number {cond:.3e} exceeds {threshold:.3e}"
    )]
    IllConditioned {
        frequency: f64,
        cond: f64,
        threshold: f64,
    },

    #[error("quadrature did not converge: estimated error {achieved:.3e}, requested {requested:.3e}")]
    Accuracy { achieved: f64, requested: f64 },

    #[error("{count} samples are marked missing; recover them before reconstructing")]
    MaskedSamples { count: usize },

    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    #[error(
        "missing samples are not recoverable: 1 is an eigenvalue of S \
         (smallest singular value of I - S is {min_singular:.3e})"
    )]
    NotRecoverable { min_singular: f64 },

    #[error("recoverability cannot be decided: {0}")]
    Undecidable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symplectic (max deviation {0:e})")]
    NotSymplectic(f64),

    #[error("covariance matrix is not symmetric positive definite")]
    InvalidCovariance,

    #[error("hbar mismatch: {0} vs {1}")]
    HbarMismatch(f64, f64),

    #[error("state trace {0} is not a positive real number")]
    InvalidTrace(Complex64),

    #[error("state is not normalized (trace {0})")]
    NotNormalized(Complex64),

    #[error("imaginary residue {0:e} exceeds tolerance")]
    ImaginaryResidue(f64),

    #[error("negative probability density {0:e}")]
    NegativeDensity(f64),

    #[error("unphysical stabilizer expectation value |<D>| = {0}")]
    UnphysicalExpectation(f64),

    #[error("rejection sampler exceeded {0} consecutive rejections")]
    RejectionLimit(u64),

    #[error("Fock cutoff {cutoff} too small: truncated population {tail:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64 },

    #[error("empty input")]
    EmptyInput,

    #[error("measured quadrature has non-positive variance {0}")]
    SingularMeasurement(f64),
}

impl Error {
    /// True for errors caused by bad user input rather than a failure during
    /// a run.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::InvalidConfig(_)
                | Error::DimensionMismatch { .. }
                | Error::HbarMismatch(..)
        )
    }
}

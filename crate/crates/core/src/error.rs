use thiserror::Error;

/// Errors raised by the algebra, module, preserver and free-probability layers.
///
/// Spectrum points and basis indices in error payloads are zero-based.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("element is not invertible at spectrum point {point}")]
    NotInvertible { point: usize },

    #[error("functional does not vanish on the kernel at spectrum point {point}")]
    KernelViolation { point: usize },

    #[error("vectors are not proportional at spectrum point {point}")]
    NotProportional { point: usize },

    #[error("rank-one sum identity violated (residual {residual:e})")]
    EquationViolated { residual: f64 },

    #[error("no trichotomy witness exists at spectrum point {point}")]
    NoWitness { point: usize },

    #[error("map is not rank decreasing: image has pointwise rank {rank} at spectrum point {point}")]
    NotRankDecreasing { point: usize, rank: usize },

    #[error("images share neither a common left nor a common right factor")]
    Inconsistent,

    #[error("images are not pointwise proportional for basis vector {index}")]
    NotPointwiseProportional { index: usize },

    #[error("pointwise scalars disagree at spectrum point {point}")]
    NoGlobalScalar { point: usize },

    #[error("operator is not injective at spectrum point {point}")]
    NotInjective { point: usize },

    #[error("map is not rank-1 preserving: {reason}")]
    NotRankOnePreserving { reason: String },

    #[error("rank-one factors are inconsistent across generators (residual {residual:e})")]
    GaugeFailure { residual: f64 },

    #[error("size {size} exceeds the supported limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

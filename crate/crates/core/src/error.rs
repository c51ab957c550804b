use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension must be positive")]
    EmptyDimension,

    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("operator is not an orthogonal projector (deviation {deviation:e})")]
    NotProjector { deviation: f64 },

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    ResourceLimit { dim: usize, cap: usize },

    #[error("grid is not uniformly spaced")]
    NonUniformGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid [{min}, {max}] does not cover the required range [{need_min}, {need_max}]")]
    GridTooNarrow { min: f64, max: f64, need_min: f64, need_max: f64 },

    #[error("shift {shift} overflows a grid of span {span}")]
    GridOverflow { shift: f64, span: f64 },

    #[error("state has zero norm")]
    ZeroState,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("pre- and post-selected states are nearly orthogonal (|overlap| = {overlap:e} <= {threshold:e})")]
    NearOrthogonal { overlap: f64, threshold: f64 },

    #[error("post-selection is incompatible with every outcome")]
    ImpossiblePostSelection,

    #[error("observable is not dichotomic ({distinct} distinct eigenvalues)")]
    NotDichotomic { distinct: usize },

    #[error("spectrum is degenerate (gap {gap:e})")]
    DegenerateSpectrum { gap: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("generalized two-state vector has no terms or only zero coefficients")]
    EmptyDescription,
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name: name.to_string(), reason: reason.into() }
    }
}

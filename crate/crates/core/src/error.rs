use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(&'static str),

    #[error("vector is not timelike: <v,v> = {norm}")]
    NotTimelike { norm: f64 },

    #[error("vector lies on the lower sheet: x0 = {x0}")]
    WrongSheet { x0: f64 },

    #[error("point is off the hyperboloid: <P,P> + 1 = {defect}")]
    OffHyperboloid { defect: f64 },

    #[error("matrix is not an orthochronous Lorentz map (defect {defect})")]
    InvalidIsometry { defect: f64 },

    #[error("vertices coincide: <P,Q> = {inner}")]
    DegeneratePair { inner: f64 },

    #[error("degenerate triangle: vertices {i} and {j} coincide")]
    DegenerateTriangle { i: usize, j: usize },

    #[error("congruence coordinate d{index} = {value} is below sqrt(3)")]
    InvalidClass { index: usize, value: f64 },

    #[error("class is not realizable: {reason}")]
    Unrealizable { reason: String },

    #[error("class degenerates to a point: d{index} = {value} is within tolerance of sqrt(3)")]
    DegenerateClass { index: usize, value: f64 },

    #[error("point-space and closed-form results disagree by {discrepancy:e}")]
    ConsistencyFailure { discrepancy: f64 },

    #[error("not enough data: {0}")]
    InsufficientData(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag, used in CLI error output.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonFinite(_) => "non_finite",
            Error::NotTimelike { .. } => "not_timelike",
            Error::WrongSheet { .. } => "wrong_sheet",
            Error::OffHyperboloid { .. } => "off_hyperboloid",
            Error::InvalidIsometry { .. } => "invalid_isometry",
            Error::DegeneratePair { .. } => "degenerate_pair",
            Error::DegenerateTriangle { .. } => "degenerate_triangle",
            Error::InvalidClass { .. } => "invalid_class",
            Error::Unrealizable { .. } => "unrealizable",
            Error::DegenerateClass { .. } => "degenerate_class",
            Error::ConsistencyFailure { .. } => "consistency_failure",
            Error::InsufficientData(_) => "insufficient_data",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Parse(_) => "parse_error",
        }
    }

    /// True for errors that indicate a numerics bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::ConsistencyFailure { .. })
    }
}

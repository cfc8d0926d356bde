use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,
    #[error("the origin is not contained in the convex hull")]
    OriginNotContained,
    #[error("the origin is not an interior point")]
    OriginNotInterior,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {dim} out of range for ambient dimension {ambient}")]
    DimensionOutOfRange { dim: usize, ambient: usize },
    #[error("ambient dimension {0} is not supported (1..=5)")]
    UnsupportedAmbient(usize),
    #[error("too many points ({0}); at most 64 are supported")]
    TooManyPoints(usize),
    #[error("linear map is singular")]
    SingularMap,
    #[error("linear map is not in SL(n): det = {0}")]
    NotSpecialLinear(String),
    #[error("degenerate basis")]
    DegenerateBasis,
    #[error("operator requires a full-dimensional polytope")]
    LowerDimensional,
    #[error("ray does not meet the body outside the origin")]
    RayOutsideBody,
    #[error("negative support value at a probe point")]
    NegativeInput,
    #[error("origin is not in the relative interior of [v0, e1, ..., em]")]
    OriginConditionViolated,
    #[error("parameter constraint violated: {0}")]
    ConstraintViolation(String),
    #[error("family/dimension mismatch: {0}")]
    FamilyDimensionMismatch(String),
    #[error("domain violation: {0}")]
    DomainViolation(String),
    #[error("parameter out of range: {0}")]
    InvalidParameter(String),
    #[error("invalid L_p order {0}")]
    InvalidOrder(f64),
    #[error("generation failed: {0}")]
    GenerationFailed(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

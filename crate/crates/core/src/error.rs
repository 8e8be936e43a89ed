use thiserror::Error;

/// Errors raised by the geometric, pinning and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("ball radius must be positive, got {0}")]
    InvalidRadius(f64),
    #[error("direction vector has zero length")]
    ZeroDirection,
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("empty label")]
    EmptyLabel,
    #[error("balls `{0}` and `{1}` overlap")]
    Overlap(String, String),
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("order is not a permutation of the configuration labels")]
    NotAPermutation,
    #[error("projections of `{0}` and `{1}` coincide: order undefined for this direction")]
    Tie(String, String),
    #[error("line misses ball `{0}`")]
    NotATransversal(String),
    #[error("balls do not share a common radius")]
    MixedRadii,
    #[error("no transversal realizes the requested order")]
    NoInitialTransversal,
    #[error("two-stage shrink infeasible: {0}")]
    Infeasible(String),
    #[error("line is parallel to the chart planes")]
    DegenerateChart,
    #[error("line is not tangent to ball `{0}`")]
    NotTangent(String),
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),
    #[error("line realizes a different order")]
    WrongOrder,
    #[error("cylinder angle {0} outside (pi/4, pi/2]")]
    BadAngle(f64),
    #[error("argument outside the function domain: {0}")]
    Domain(String),
    #[error("invalid input: {0}")]
    InputInvalid(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

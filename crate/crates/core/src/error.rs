use alloc::string::String;

/// Errors raised by space construction and the operators built on it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("space has no points")]
    EmptySpace,

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("metric violation at ({0}, {1}, {2}): {3}", .triple.0, .triple.1, .triple.2, .reason)]
    MetricViolation {
        triple: (usize, usize, usize),
        reason: &'static str,
    },

    #[error("weight of point {index} is not a positive finite number ({value})")]
    NonpositiveWeight { index: usize, value: f64 },

    #[error("dominating function is not monotone (or not positive) at point {point}, radius {radius}")]
    LambdaNotMonotone { point: usize, radius: f64 },

    #[error("dominating function evaluated at radius 0 for point {point} in a denominator")]
    LambdaAtZero { point: usize },

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("point index {index} out of range for a space of {len} points")]
    PointOutOfRange { index: usize, len: usize },

    #[error("canonical ball family has {size} balls, above the cap of {cap}; subsample the space")]
    FamilyTooLarge { size: usize, cap: usize },

    #[error("K-coefficient needs an inner ball of positive radius")]
    DegenerateBall,

    #[error("greedy cover lost point {point}: the dilated kept balls do not cover the input union")]
    CoverGuaranteeFailed { point: usize },

    #[error("multilinear commutator order {k} exceeds the supported maximum of {max}")]
    KTooLarge { k: usize, max: usize },

    #[error("experiment configuration infeasible: {0}")]
    ConfigInfeasible(String),

    #[error("RBMO norm of function {index} is zero; the normalized ratio is undefined")]
    ZeroRbmo { index: usize },

    #[error("domination degenerate at point {point} (trial {trial}): right side is 0 but left side is {lhs}")]
    DominationDegenerate { point: usize, trial: usize, lhs: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

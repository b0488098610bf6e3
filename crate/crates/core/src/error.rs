use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("coordinate {index} = {value} outside [{low}, {high}] (margin {margin})")]
    OutOfDomain {
        index: usize,
        value: f64,
        low: f64,
        high: f64,
        margin: f64,
    },

    #[error("metric is near singular (condition number {condition:.3e})")]
    NearSingularMetric { condition: f64 },

    #[error("numerical rank {numerical} differs from declared rank {declared}")]
    RankDrop { declared: usize, numerical: usize },

    #[error("derivative is not an isometry on the horizontal space (defect {defect:.3e})")]
    NotRiemannian { defect: f64 },

    #[error("map of rank {rank} into dimension {target_dim} is not a submersion")]
    NotASubmersion { rank: usize, target_dim: usize },

    #[error("traced Gauss identity residual {residual:.3e} exceeds {tolerance:.1e}")]
    GaussResidualExceeded { residual: f64, tolerance: f64 },

    #[error("model curvature mismatch {residual:.3e} at point {point:?}")]
    ValidationFailed { residual: f64, point: Vec<f64> },

    #[error("proviso violated: {0}")]
    ProvisoViolated(String),

    #[error("restricted Hessian is indefinite (eigenvalue {min_eigenvalue:.3e})")]
    IndefiniteRestriction { min_eigenvalue: f64 },

    #[error(
        "xi is neither tangent nor normal (tangent defect {tangent_defect:.3e}, normal defect {normal_defect:.3e})"
    )]
    BranchUndetermined { tangent_defect: f64, normal_defect: f64 },

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("unknown identifier: {0}")]
    Unknown(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// No atom carries positive weight.
    #[error("measure has no positive weight")]
    EmptySupport,

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },

    /// The problem exceeds the dense solver's budget.
    #[error("problem size {size} exceeds limit {limit}")]
    SizeLimit { size: usize, limit: usize },

    /// A ball is too small to be resolved by the requested grid.
    #[error("grid too coarse: ball diameter {diameter} < 2 * spacing {spacing}")]
    GridTooCoarse { diameter: f64, spacing: f64 },

    /// Plans cannot be glued because their shared marginals disagree.
    #[error("marginal mismatch: {0}")]
    MarginalMismatch(String),

    /// Invalid parameters for a projection or a measure.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// Atoms too close for the closed-form ball projection.
    #[error("atoms {i} and {j} are {distance} apart, need at least {required}")]
    OverlapError {
        i: usize,
        j: usize,
        distance: f64,
        required: f64,
    },

    /// The grid cannot hold unit mass at the requested density.
    #[error("grid capacity {capacity} is below total mass 1")]
    InfeasibleCapacity { capacity: f64 },

    /// A source atom lies outside the grid hull.
    #[error("atom {index} lies outside the grid")]
    AtomOutsideGrid { index: usize },

    /// The counterexample requires at least two dimensions.
    #[error("dimension {0} too small, need d >= 2")]
    DimensionTooSmall(usize),

    /// Bisection preconditions on the gap sign failed.
    #[error("no sign change of the gap on [{lo}, {hi}]: gap(lo) = {gap_lo}, gap(hi) = {gap_hi}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        gap_lo: f64,
        gap_hi: f64,
    },

    /// A measure handed to a check violates its density cap.
    #[error("input violates density cap: {0}")]
    InfeasibleInput(String),

    /// The network simplex terminated without a feasible optimum.
    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

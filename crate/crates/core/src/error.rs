use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is below the minimum of 2")]
    DimensionTooSmall(usize),
    #[error("entry {index} is not finite")]
    NonFinite { index: usize },
    #[error("order r = {r} outside the admissible range {lo}..={hi}")]
    OrderOutOfRange { r: usize, lo: usize, hi: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point is not in the open cone Γ_{r}")]
    OutsideCone { r: usize },
    #[error("point is off the model manifold (defect {defect:e})")]
    OffManifold { defect: f64 },
    #[error("vector is not tangent to the model at the base point (defect {defect:e})")]
    NotTangent { defect: f64 },
    #[error("argument {value} outside the domain of {what}")]
    OutOfDomain { what: &'static str, value: f64 },
    #[error("distance function is not smooth at the center point")]
    AtCenter,
    #[error("first fundamental form is degenerate")]
    DegenerateMetric,
    #[error("normal vector candidate vanishes")]
    VanishingNormal,
    #[error("principal curvatures are degenerate; eigenframe unreliable")]
    DegenerateFrame,
    #[error("jet order {have} is insufficient, {need} required")]
    JetOrder { have: usize, need: usize },
    #[error("chart domain is unbounded")]
    Unbounded,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;

use alloc::string::String;

/// Failure modes shared by every kernel in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeometryError {
    #[error("metric is singular at tolerance (condition estimate {condition:e})")]
    SingularMetric { condition: f64 },
    #[error("orientation field is not timelike (g(X,X) = {value:e})")]
    NonTimelikeOrientation { value: f64 },
    #[error("vectors are collinear within tolerance")]
    CollinearPair,
    #[error("submanifold is not spacelike at parameter sample {sample}")]
    NotSpacelike { sample: usize },
    #[error("embedding is not an immersion at parameter sample {sample}")]
    ImmersionFailure { sample: usize },
    #[error("expected codimension {expected}, found {found}")]
    CodimensionMismatch { expected: usize, found: usize },
    #[error("normal orientation cannot be propagated consistently: {0}")]
    OrientationFailure(String),
    #[error("configuration is not weakly trapped at sample {sample}: g(H,H) = {hh:e}, g(H,X) = {hx:e}")]
    NotWeaklyTrapped { sample: usize, hh: f64, hx: f64 },
    #[error("zero vector")]
    ZeroVector,
    #[error("normal is not a unit normal (defect {defect:e})")]
    NotUnitNormal { defect: f64 },
    #[error("grid resolution {found} is below the minimum {minimum} per axis")]
    ResolutionTooLow { found: usize, minimum: usize },
    #[error("eigensolver did not converge within {iterations} iterations")]
    EigensolverFailure { iterations: usize },
    #[error("principal eigenvalue {lambda1:e} is degenerate")]
    DegenerateMots { lambda1: f64 },
    #[error("basis columns are linearly dependent (rank {rank} of {columns})")]
    DependentBasis { rank: usize, columns: usize },
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("bad scenario parameters: {0}")]
    BadParams(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid jet: {0}")]
    InvalidJet(String),
}

pub type Result<T> = core::result::Result<T, GeometryError>;

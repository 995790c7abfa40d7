use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeomError {
    #[error("normals do not positively span the ambient space; polyhedron is unbounded")]
    Unbounded,
    #[error("degenerate facet: {0}")]
    DegenerateFacet(String),
    #[error("point set is lower dimensional (affine rank {rank} < {dim})")]
    LowerDimensional { rank: usize, dim: usize },
    #[error("linear map is singular (|det| = {0:e})")]
    Singular(f64),
    #[error("unknown body kind `{0}`")]
    UnknownKind(String),
    #[error("flat misses the body; section is empty")]
    EmptySection,
    #[error("body is not full dimensional")]
    NotFullDimensional,
    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
    },
    #[error("body is not centrally symmetric")]
    NotSymmetric,
    #[error("measure is not centered: |sum w u| = {centering:e}, mass = {mass:e}")]
    InfeasibleMeasure { centering: f64, mass: f64 },
    #[error("every facet vanished during the Minkowski solve")]
    AllFacetsDropped,
    #[error("radial function is not positive at grid index {0}")]
    NonPositiveRadial(usize),
    #[error("origin is not an interior point")]
    OriginNotInterior,
    #[error("samples are defined on different grids")]
    GridMismatch,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, GeomError>;

use thiserror::Error;

/// Errors raised by mesh construction, extension and solving.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("face list is empty")]
    EmptyMesh,
    #[error("face {face} is invalid: {reason}")]
    InvalidFace { face: usize, reason: String },
    #[error("edge ({0}, {1}) is shared by more than two faces")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} has a non-disk neighborhood")]
    NonManifoldVertex(usize),
    #[error("surface is not orientable")]
    NonOrientable,
    #[error("surface is not connected (vertex {0} unreachable)")]
    Disconnected(usize),
    #[error("degenerate triangle at face {face}")]
    DegenerateTriangle { face: usize },
    #[error("edge length {length} on edge {edge} is not positive and finite")]
    NonPositiveLength { edge: usize, length: f64 },
    #[error("edge ({0}, {1}) is not an edge of the mesh")]
    UnknownEdge(usize, usize),
    #[error("no length given for edge ({0}, {1})")]
    MissingLength(usize, usize),
    #[error("vertex {vertex} is not a corner of face {face}")]
    NotACorner { face: usize, vertex: usize },
    #[error("vertex {0} lies on the boundary")]
    BoundaryVertex(usize),
    #[error("vertex {0} is an interior vertex")]
    InteriorVertex(usize),
    #[error("mesh has no boundary")]
    NoBoundary,
    #[error("mesh is not closed")]
    NotClosed,
    #[error("mesh has no interior vertex")]
    NoInteriorVertex,
    #[error("{what}: expected {expected} entries, got {got}")]
    IndexMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("cap interior carries zero mass; supply a nonzero seed")]
    ZeroInteriorMass,
    #[error("target curvatures sum to {sum}, expected 2*pi*chi = {expected}")]
    TargetSumMismatch { sum: f64, expected: f64 },
    #[error("target curvature {value} at vertex {vertex} is not below 2*pi")]
    ConeAngleViolation { vertex: usize, value: f64 },
    #[error("line search stalled at iteration {iteration} (residual {residual:e})")]
    LineSearchStall { iteration: usize, residual: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    MaxIterExceeded { iterations: usize, residual: f64 },
    #[error("invalid solver options: {0}")]
    InvalidOptions(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of the numerical solve itself rather than of its inputs.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::LineSearchStall { .. } | Error::MaxIterExceeded { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

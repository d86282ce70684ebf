use thiserror::Error;

/// Errors raised by the geometric operations of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point is not on the AdS quadric: <x,x> = {0}")]
    NotOnQuadric(f64),
    #[error("vector is not tangent at its base point: <x,v> = {0}")]
    NotTangent(f64),
    #[error("lightlike direction where a unit timelike or spacelike one is required")]
    Lightlike,
    #[error("direction is not unit: <v,v> = {0}")]
    NotUnit(f64),
    #[error("tangent vectors are based at different points")]
    BasePointMismatch,
    #[error("zero vector")]
    ZeroVector,
    #[error("matrix must have positive determinant, got {0}")]
    BadDeterminant(f64),
    #[error("lift offset {s} is not a lift of the projective action (residual {residual})")]
    BadLift { s: f64, residual: f64 },
    #[error("translation number did not converge (estimate {estimate}, expected {expected})")]
    NonConvergence { estimate: f64, expected: f64 },
    #[error("elliptic element has no fixed point on the lifted line")]
    EllipticHasNoFixedPoint,
    #[error("holonomy is not a positively oriented generator: {0}")]
    NotPositiveGenerator(String),
    #[error("odd degree {0}: link circles must have even degree")]
    OddDegree(i64),
    #[error("negative degree {0}")]
    NegativeDegree(i64),
    #[error("inconsistent fixed-point data: {0}")]
    FixedPointData(String),
    #[error("malformed arc data: {0}")]
    MalformedArcs(String),
    #[error("cross-ratio below 1 for both indexings: {0}")]
    CrossRatio(f64),
    #[error("gluing map does not preserve the cut: {0}")]
    GlueMap(String),
    #[error("surface is not hyperbolic: area {0} <= 0")]
    NotHyperbolic(f64),
    #[error("angles do not form a hyperbolic triangle: {0}")]
    BadTriangleAngles(String),
    #[error("edge lengths violate the triangle inequality on face {0}")]
    TriangleInequality(usize),
    #[error("invalid triangulation: {0}")]
    Triangulation(String),
    #[error("loop is invalid: {0}")]
    BadLoop(String),
    #[error("vertex angle mismatch at vertex {vertex}: expected {expected}, got {actual}")]
    AngleMismatch { vertex: usize, expected: f64, actual: f64 },
    #[error("invalid disk: {0}")]
    BadDisk(String),
    #[error("structurally invalid HS-surface: {0}")]
    InvalidSurface(String),
    #[error("not an interaction: {0} singularities, at least 3 required")]
    TooFewSingularities(usize),
    #[error("surface is not causal: {0}")]
    NotCausal(String),
    #[error("inconsistent vertex record {vertex}: {reason}")]
    VertexRecord { vertex: usize, reason: String },
    #[error("unknown singular line: {0}")]
    UnknownLine(String),
    #[error("curve leaves the unit disk at sample {0}")]
    LeavesDisk(usize),
    #[error("grid too coarse: spacing {0} > 1e-2")]
    GridTooCoarse(f64),
    #[error("sampling too coarse: step {0} > 1e-3")]
    SamplingTooCoarse(f64),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate surface jet at sample {0}")]
    DegenerateJet(usize),
    #[error("invalid surface jet: {0}")]
    InvalidJet(String),
    #[error("transport failed: {0}")]
    Transport(String),
    #[error("invalid interaction graph: {0}")]
    InvalidGraph(String),
    #[error("conjugator solve failed: {0}")]
    Conjugator(String),
}

pub type Result<T> = std::result::Result<T, Error>;

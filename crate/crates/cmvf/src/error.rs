//! Error type shared by all modules.

use thiserror::Error;

/// Everything that can go wrong while building complexes, fields, or
/// running the dynamics pipeline.
#[derive(Debug, Error)]
pub enum Error {
    // --- exact arithmetic ---
    /// Inverting the zero scalar.
    #[error("cannot invert zero in {field}")]
    ZeroInverse { field: String },
    /// reduce_pair was pointed at a zero pivot entry.
    #[error("pivot entry ({row}, {col}) is zero")]
    PivotZero { row: usize, col: usize },
    /// A modulus that is not a prime was requested for GF(p).
    #[error("{0} is not prime, GF(p) needs a prime modulus")]
    NotPrime(u64),

    // --- complex construction and validation ---
    /// An incidence entry connects cells whose dimensions do not differ by one.
    #[error("grading violation: kappa({x}, {y}) != 0 but dim {x} = {dx}, dim {y} = {dy}")]
    GradingViolation { x: String, y: String, dx: usize, dy: usize },
    /// The composite incidence sum is nonzero for some cell pair.
    #[error("boundary does not square to zero: witness cells ({x}, {y})")]
    SquareNotZero { x: String, y: String },
    /// A requested subset is not locally closed where it must be.
    #[error("cell set is not locally closed: {context}")]
    NotLocallyClosed { context: String },
    /// The same simplex was handed to the simplicial builder twice.
    #[error("duplicate simplex {0:?}")]
    DuplicateSimplex(Vec<usize>),
    /// A simplex refers to a vertex outside 0..vertex_count.
    #[error("simplex {simplex:?} uses vertex {vertex} but only {vertex_count} vertices exist")]
    InvalidVertex { simplex: Vec<usize>, vertex: usize, vertex_count: usize },
    /// A cube coordinate lies outside the declared grid.
    #[error("cube {cube:?} lies outside grid {dims:?}")]
    OutOfGrid { cube: Vec<usize>, dims: Vec<usize> },
    /// Delaunay input that admits no triangulation (too few or collinear points, duplicates).
    #[error("degenerate Delaunay input: {0}")]
    DegenerateInput(String),
    /// A cell id that does not exist in the complex.
    #[error("unknown cell id {0}")]
    UnknownCell(usize),
    /// Malformed serialized complex or field data.
    #[error("invalid data: {0}")]
    InvalidData(String),

    // --- multivector fields ---
    /// A candidate multivector field does not partition the complex.
    #[error("not a partition: {context}")]
    NotAPartition { context: String },

    // --- dynamics ---
    /// A set of Morse-poset indices that is not order-convex.
    #[error("index set {indices:?} is not a poset interval: {p} < {q} < {r} but {q} is missing")]
    NotAnInterval { indices: Vec<usize>, p: usize, q: usize, r: usize },
    /// No essential solution passes through the requested cell.
    #[error("no essential solution passes through cell {0}")]
    NoEssentialSolution(usize),

    // --- conley ---
    /// Conley index of a set that is not an isolated invariant set.
    #[error("not an isolated invariant set: {context}")]
    NotIsolatedInvariant { context: String },
    /// Connection-matrix reduction ran out of admissible pivots early.
    #[error("reduction stalled: {remaining} entries remain inside strata with no admissible pivot")]
    ReductionStalled { remaining: usize },

    // --- expression parsing and evaluation ---
    /// Unparseable vector-field source text.
    #[error("syntax error at byte {position}: {message}")]
    SyntaxError { position: usize, message: String },
    /// A variable outside x1..xn.
    #[error("unknown variable '{name}' (expected x1..x{n})")]
    UnknownVariable { name: String, n: usize },
    /// Component count or point dimension does not match the ambient dimension.
    #[error("arity mismatch: {context}")]
    ArityMismatch { context: String },
    /// Division by zero or a similar domain fault while evaluating.
    #[error("evaluation domain error: {context}")]
    EvalDomain { context: String },

    // --- pipeline / cli ---
    /// Bad run configuration (unknown system, malformed mesh spec, bad field...).
    #[error("configuration error: {0}")]
    Config(String),
    /// Connection-matrix verification found a failing check.
    #[error("verification failed: {0}")]
    VerificationFailed(String),
    /// Filesystem trouble while writing outputs.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 4 verification, 3 any other computation error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::VerificationFailed(_) => 4,
            _ => 3,
        }
    }
}

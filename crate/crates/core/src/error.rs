use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures raised at the scoring boundary.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvaluatorError {
    #[error("failed to spawn evaluator `{command}`: {reason}")]
    SpawnFailure { command: String, reason: String },
    #[error("evaluator did not answer within {timeout_s} s")]
    Timeout { timeout_s: f64 },
    #[error("malformed evaluator response: {0}")]
    MalformedResponse(String),
    #[error("evaluator returned no score for view `{0}`")]
    IncompleteScores(String),
    #[error("evaluator returned a non-finite score for view `{0}`")]
    NonFiniteScore(String),
    #[error("evaluator failed: {0}")]
    Failure(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate view id `{0}`")]
    DuplicateId(String),
    #[error("at least 2 views are required, got {0}")]
    TooFewViews(usize),
    #[error("unknown view id `{0}`")]
    UnknownView(String),
    #[error("camera `{0}` coincides with the projection origin")]
    DegenerateCenter(String),
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("view `{0}` is not on the unit sphere")]
    NotOnSphere(String),
    #[error("camera `{id}` has a non-orthonormal rotation (deviation {deviation:.3e})")]
    NonOrthonormalRotation { id: String, deviation: f64 },
    #[error("camera `{id}` has invalid intrinsics: {reason}")]
    InvalidIntrinsics { id: String, reason: String },
    #[error("camera `{0}` has no intrinsics")]
    MissingIntrinsics(String),
    #[error("co-visibility matrix has no shared points between distinct views")]
    EmptyCovisibility,
    #[error("co-visibility matrix is not symmetric at ({0}, {1})")]
    AsymmetricCovisibility(usize, usize),
    #[error("mesh has no triangles")]
    EmptyMesh,
    #[error("triangle {triangle} references vertex {vertex} out of range")]
    IndexOutOfRange { triangle: usize, vertex: usize },
    #[error("triangle {triangle} is degenerate (area {area:.3e})")]
    DegenerateTriangle { triangle: usize, area: f64 },
    #[error("requested {requested} views from a pool of {available}")]
    BudgetExceedsPool { requested: usize, available: usize },
    #[error("initial views plus schedule need {requested} views but the pool has {available}")]
    ScheduleExhaustsPool { requested: usize, available: usize },
    #[error("cannot draw {requested} distinct views from {available} candidates")]
    DrawExceedsPool { requested: usize, available: usize },
    #[error("not enough unselected candidates: need {requested}, have {available}")]
    PoolExhausted { requested: usize, available: usize },
    #[error("at least 2 selected views are required, got {0}")]
    TooFewSelected(usize),
    #[error("camera centers do not span a 3D convex hull")]
    DegenerateHull,
    #[error("coverage fields were computed on different surface samples")]
    SampleMismatch,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Evaluator(#[from] EvaluatorError),
    #[error("{}: {message}", location(path, *line))]
    Parse {
        path: PathBuf,
        /// 1-based; 0 when the problem is not tied to one line.
        line: usize,
        message: String,
    },
    #[error("required file missing: {0}")]
    MissingFile(PathBuf),
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersionMismatch { found: u64, expected: u64 },
    #[error("invalid manifest: {0}")]
    InvalidManifest(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

fn location(path: &std::path::Path, line: usize) -> String {
    if line == 0 {
        path.display().to_string()
    } else {
        format!("{}:{line}", path.display())
    }
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

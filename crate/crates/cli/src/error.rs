use thiserror::Error;
use viewdir_core::Error as CoreError;

/// Command failures, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("evaluator error: {0}")]
    Evaluator(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Evaluator(_) => 4,
            CliError::Internal(_) => 5,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        let msg = e.to_string();
        match e {
            CoreError::InvalidConfig(_)
            | CoreError::BudgetExceedsPool { .. }
            | CoreError::ScheduleExhaustsPool { .. }
            | CoreError::DrawExceedsPool { .. }
            | CoreError::PoolExhausted { .. }
            | CoreError::TooFewSelected(_)
            | CoreError::NotOnSphere(_)
            | CoreError::NotUnit(_) => CliError::Config(msg),
            CoreError::Evaluator(_) => CliError::Evaluator(msg),
            CoreError::DuplicateId(_)
            | CoreError::TooFewViews(_)
            | CoreError::UnknownView(_)
            | CoreError::DegenerateCenter(_)
            | CoreError::NonOrthonormalRotation { .. }
            | CoreError::InvalidIntrinsics { .. }
            | CoreError::MissingIntrinsics(_)
            | CoreError::EmptyCovisibility
            | CoreError::AsymmetricCovisibility(..)
            | CoreError::EmptyMesh
            | CoreError::IndexOutOfRange { .. }
            | CoreError::DegenerateTriangle { .. }
            | CoreError::DegenerateHull
            | CoreError::SampleMismatch
            | CoreError::Parse { .. }
            | CoreError::MissingFile(_)
            | CoreError::SchemaVersionMismatch { .. }
            | CoreError::InvalidManifest(_)
            | CoreError::Io(_)
            | CoreError::Json(_) => CliError::Data(msg),
        }
    }
}

impl From<viewdir_core::EvaluatorError> for CliError {
    fn from(e: viewdir_core::EvaluatorError) -> Self {
        CliError::Evaluator(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

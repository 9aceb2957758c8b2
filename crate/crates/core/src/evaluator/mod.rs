//! The scoring boundary of the sampling loop.
//!
//! An [`Evaluator`] receives the current view set (selection plus pool) and
//! returns a quality score for every unselected candidate, higher is better.
//! Two implementations ship: a synthetic oracle on the unit sphere and a
//! bridge to an external trainer process.

pub mod external;
pub mod oracle;

use serde::{Deserialize, Serialize};

use crate::error::EvaluatorError;
use crate::scene::{QualityReport, ViewSet};

pub use external::ExternalEvaluator;
pub use oracle::{oracle_score_views, oracle_scores, Hotspot, OracleParams, SyntheticOracle};

pub trait Evaluator {
    /// Scores every candidate of `set` after training on its selection.
    fn evaluate(&mut self, round: usize, set: &ViewSet) -> Result<QualityReport, EvaluatorError>;
}

impl<E: Evaluator + ?Sized> Evaluator for Box<E> {
    fn evaluate(&mut self, round: usize, set: &ViewSet) -> Result<QualityReport, EvaluatorError> {
        (**self).evaluate(round, set)
    }
}

/// Serializable choice of evaluator, as it appears in run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EvaluatorBinding {
    SyntheticOracle(OracleParams),
    ExternalProcess { command: String, timeout_s: f64 },
}

impl EvaluatorBinding {
    pub fn validate(&self) -> crate::Result<()> {
        match self {
            EvaluatorBinding::SyntheticOracle(p) => p.validate(),
            EvaluatorBinding::ExternalProcess { timeout_s, .. } if !(*timeout_s > 0.0 && timeout_s.is_finite()) => Err(
                crate::Error::InvalidConfig(format!("evaluator timeout must be positive, got {timeout_s}")),
            ),
            EvaluatorBinding::ExternalProcess { .. } => Ok(()),
        }
    }

    /// Instantiates the evaluator; `dataset_path` is forwarded to external processes.
    pub fn build(&self, dataset_path: Option<String>) -> crate::Result<Box<dyn Evaluator + Send>> {
        self.validate()?;
        Ok(match self {
            EvaluatorBinding::SyntheticOracle(p) => Box::new(SyntheticOracle::new(p.clone())?),
            EvaluatorBinding::ExternalProcess { command, timeout_s } => Box::new(
                ExternalEvaluator::new(command.clone(), std::time::Duration::from_secs_f64(*timeout_s))
                    .with_dataset_path(dataset_path),
            ),
        })
    }
}

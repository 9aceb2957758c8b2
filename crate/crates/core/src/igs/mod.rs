//! Information-gain sampling: a loop of evaluate → rank → sample → (relax)
//! that grows the selected set by a fixed schedule of batch sizes.
//!
//! Quality scores are higher-is-better everywhere; every sampler works on
//! an [`ErrorRanking`] where rank 0 is the lowest-quality candidate.

pub mod vmf;
pub mod zipf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, EvaluatorError, Result};
use crate::evaluator::Evaluator;
use crate::random::{initial_picks, rng_from_seed};
use crate::relax::{lloyd_relax, sample_support, snap_to_candidates, LloydConfig};
use crate::scene::{QualityReport, Vec3, ViewSet};

pub use vmf::{mean_resultant_length, mvmf_draw, mvmf_weights, vmf_sample, MvmfDraw};
pub use zipf::{weighted_draw_without_replacement, zipf_draw, zipf_pmf};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Sampler {
    /// Take the `l` lowest-quality candidates.
    Greedy,
    /// Rank-based pmf `∝ exp(−γ·rank/(q−1))`, drawn without replacement.
    Zipf { gamma: f64 },
    /// Mixture of vMF components with concentration `kappa` and softmax temperature `sigma`.
    Mvmf { kappa: f64, sigma: f64 },
}

impl Sampler {
    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        match *self {
            Sampler::Greedy => Ok(()),
            Sampler::Zipf { gamma } if ok(gamma) => Ok(()),
            Sampler::Mvmf { kappa, sigma } if ok(kappa) && ok(sigma) => Ok(()),
            other => Err(Error::InvalidConfig(format!(
                "sampler parameters must be finite and positive: {other:?}"
            ))),
        }
    }
}

/// Candidates ordered from worst to best quality.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRanking {
    order: Vec<usize>,
    rank: std::collections::HashMap<usize, usize>,
}

impl ErrorRanking {
    /// Ranks `items` by ascending score; equal scores are ordered by the
    /// smaller `tiebreak` key.
    pub fn new(items: &[usize], scores: &[f64], tiebreak: impl Fn(usize) -> usize) -> Self {
        assert_eq!(items.len(), scores.len());
        let mut pos: Vec<usize> = (0..items.len()).collect();
        pos.sort_by(|&a, &b| {
            scores[a]
                .total_cmp(&scores[b])
                .then_with(|| tiebreak(items[a]).cmp(&tiebreak(items[b])))
        });
        let order: Vec<usize> = pos.iter().map(|&p| items[p]).collect();
        let rank = order.iter().enumerate().map(|(r, &item)| (item, r)).collect();
        ErrorRanking { order, rank }
    }

    /// Ranking of the candidates of `set` under `report`.
    pub fn from_report(set: &ViewSet, report: &QualityReport) -> Result<Self, EvaluatorError> {
        let candidates = set.candidates();
        let ids: Vec<&str> = candidates.iter().map(|&i| set.view(i).id()).collect();
        report.validate_for(&ids)?;
        let scores = report.scores_for(&ids);
        Ok(ErrorRanking::new(&candidates, &scores, |i| set.lex_rank(i)))
    }

    /// Items worst first.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn rank_of(&self, item: usize) -> Option<usize> {
        self.rank.get(&item).copied()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IgsConfig {
    pub initial_k: usize,
    /// Views added per round.
    pub schedule: Vec<usize>,
    pub sampler: Sampler,
    pub relaxation: Option<LloydConfig>,
    pub seed: u64,
}

impl IgsConfig {
    /// Five random views, then +5 per round up to 30 and +10 per round up to 150.
    pub fn default_schedule() -> (usize, Vec<usize>) {
        let mut schedule = vec![5; 5];
        schedule.extend(std::iter::repeat_n(10, 12));
        (5, schedule)
    }

    pub fn validate(&self, pool: usize) -> Result<()> {
        if self.initial_k == 0 {
            return Err(Error::InvalidConfig("initial_k must be positive".into()));
        }
        if self.schedule.contains(&0) {
            return Err(Error::InvalidConfig("schedule entries must be positive".into()));
        }
        self.sampler.validate()?;
        let requested = self.initial_k + self.schedule.iter().sum::<usize>();
        if requested > pool {
            return Err(Error::ScheduleExhaustsPool {
                requested,
                available: pool,
            });
        }
        if let Some(relax) = &self.relaxation {
            relax.validate()?;
        }
        Ok(())
    }
}

/// One line of the per-round log: one record per candidate scored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: usize,
    pub view_id: String,
    pub score: f64,
    pub rank: usize,
    pub drawn: bool,
    pub relaxed_to: Option<String>,
}

#[derive(Debug, Clone)]
pub struct IgsOutcome {
    pub set: ViewSet,
    pub log: Vec<RoundRecord>,
    /// Total candidate scores requested from the evaluator.
    pub evaluator_calls: usize,
    /// Mean candidate score reported at the start of each round.
    pub round_means: Vec<f64>,
}

/// Runs the loop: `initial_k` random views, then one round per schedule
/// entry. Each round scores every candidate, draws `l_i` of them with the
/// configured sampler, optionally relaxes the proposals and snaps them back
/// to unselected views, and adds them to the selection.
pub fn igs_run(set: &ViewSet, cfg: &IgsConfig, evaluator: &mut dyn Evaluator) -> Result<IgsOutcome> {
    cfg.validate(set.len())?;
    let mut rng = rng_from_seed(cfg.seed);

    let mut current = set.clone();
    if current.selected().len() < cfg.initial_k {
        let picks = initial_picks(&current, cfg.initial_k - current.selected().len(), &mut rng);
        current = current.with_selected(&picks)?;
    }
    let available = current.candidates().len();
    let needed: usize = cfg.schedule.iter().sum();
    if needed > available {
        return Err(Error::ScheduleExhaustsPool {
            requested: needed,
            available,
        });
    }

    let support = match &cfg.relaxation {
        Some(relax) => Some(sample_support(set, relax, &mut rng_from_seed(relax.seed))?),
        None => None,
    };
    if matches!(cfg.sampler, Sampler::Mvmf { .. }) {
        for v in set.views() {
            if (v.center().norm() - 1.0).abs() > 1e-6 {
                return Err(Error::NotOnSphere(v.id().to_string()));
            }
        }
    }

    let mut log = Vec::new();
    let mut evaluator_calls = 0;
    let mut round_means = Vec::with_capacity(cfg.schedule.len());

    for (round, &l) in cfg.schedule.iter().enumerate() {
        let candidates = current.candidates();
        let report = evaluator.evaluate(round, &current)?;
        evaluator_calls += candidates.len();
        let ranking = ErrorRanking::from_report(&current, &report)?;
        let ids: Vec<&str> = candidates.iter().map(|&i| current.view(i).id()).collect();
        let scores = report.scores_for(&ids);
        round_means.push(scores.iter().sum::<f64>() / scores.len() as f64);

        let drawn: Vec<usize> = match cfg.sampler {
            Sampler::Greedy => ranking.order()[..l].to_vec(),
            Sampler::Zipf { gamma } => zipf_draw(&ranking, gamma, l, &mut rng)?,
            Sampler::Mvmf { kappa, sigma } => {
                let centers: Vec<Vec3> = candidates.iter().map(|&i| *current.view(i).center()).collect();
                let position: std::collections::HashMap<usize, usize> =
                    candidates.iter().enumerate().map(|(p, &i)| (i, p)).collect();
                let worst_first: Vec<usize> = ranking.order().iter().map(|i| position[i]).collect();
                let tiebreak: Vec<usize> = candidates.iter().map(|&i| current.lex_rank(i)).collect();
                let input = MvmfDraw {
                    centers: &centers,
                    scores: &scores,
                    worst_first: &worst_first,
                    tiebreak: &tiebreak,
                    kappa,
                    sigma,
                };
                mvmf_draw(&input, l, &mut rng)?
                    .into_iter()
                    .map(|p| candidates[p])
                    .collect()
            }
        };

        let (added, relaxed_to): (Vec<usize>, Vec<Option<usize>>) = match (&cfg.relaxation, &support) {
            (Some(relax), Some(support)) => {
                let fixed: Vec<Vec3> = current.selected().iter().map(|&i| *current.view(i).center()).collect();
                let proposals: Vec<Vec3> = drawn.iter().map(|&i| *current.view(i).center()).collect();
                let relaxed = lloyd_relax(&fixed, &proposals, support, relax)?;
                let snapped = snap_to_candidates(&relaxed, &current)?;
                (snapped.clone(), snapped.into_iter().map(Some).collect())
            }
            _ => (drawn.clone(), vec![None; drawn.len()]),
        };

        for (&view, &score) in candidates.iter().zip(&scores) {
            let slot = drawn.iter().position(|&d| d == view);
            log.push(RoundRecord {
                round,
                view_id: current.view(view).id().to_string(),
                score,
                rank: ranking.rank_of(view).expect("ranked"),
                drawn: slot.is_some(),
                relaxed_to: slot
                    .and_then(|s| relaxed_to[s])
                    .map(|r| current.view(r).id().to_string()),
            });
        }
        current = current.with_selected(&added)?;
    }

    Ok(IgsOutcome {
        set: current,
        log,
        evaluator_calls,
        round_means,
    })
}

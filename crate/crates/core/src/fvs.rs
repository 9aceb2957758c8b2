//! Farthest view sampling: greedy maximin growth of the selected set.
//!
//! After `initial_k` random seeds, each step adds the candidate whose
//! distance to its nearest selected view is largest. Per-candidate
//! nearest-selected distances are cached and refreshed against the newest
//! pick only, so a run costs `O(n · |V|)` distance evaluations.

use crate::error::{Error, Result};
use crate::metrics::{DistanceSpec, PoolMetric};
use crate::par::Exec;
use crate::random::{initial_picks, rng_from_seed};
use crate::scene::ViewSet;

#[derive(Debug, Clone)]
pub struct FvsConfig {
    pub target_n: usize,
    pub initial_k: usize,
    pub seed: u64,
    pub spec: DistanceSpec,
    /// Ids used as the initial views instead of a random draw.
    pub initial_ids: Option<Vec<String>>,
    pub exec: Exec,
}

impl FvsConfig {
    pub fn new(target_n: usize, spec: DistanceSpec) -> Self {
        FvsConfig {
            target_n,
            initial_k: 1,
            seed: 0,
            spec,
            initial_ids: None,
            exec: Exec::default(),
        }
    }

    pub fn with_initial_k(mut self, k: usize) -> Self {
        self.initial_k = k;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_initial_ids<S: Into<String>>(mut self, ids: impl IntoIterator<Item = S>) -> Self {
        let ids: Vec<String> = ids.into_iter().map(Into::into).collect();
        self.initial_k = ids.len();
        self.initial_ids = Some(ids);
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    fn validate(&self, pool: usize) -> Result<()> {
        if self.target_n == 0 || self.initial_k == 0 {
            return Err(Error::InvalidConfig("target_n and initial_k must be positive".into()));
        }
        if self.initial_k > self.target_n {
            return Err(Error::InvalidConfig(format!(
                "initial_k ({}) exceeds target_n ({})",
                self.initial_k, self.target_n
            )));
        }
        if self.target_n > pool {
            return Err(Error::BudgetExceedsPool {
                requested: self.target_n,
                available: pool,
            });
        }
        self.spec.validate()
    }
}

/// One greedy pick and the maximin distance that justified it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FvsStep {
    pub view: usize,
    /// Distance to the nearest previously selected view (`None` for random seeds).
    pub min_distance: Option<f64>,
}

/// Runs farthest view sampling and returns the pool with the selection set.
pub fn fvs_select(set: &ViewSet, cfg: &FvsConfig) -> Result<ViewSet> {
    Ok(fvs_trace(set, cfg)?.0)
}

/// [`fvs_select`] plus the per-step record.
pub fn fvs_trace(set: &ViewSet, cfg: &FvsConfig) -> Result<(ViewSet, Vec<FvsStep>)> {
    cfg.validate(set.len())?;
    let metric = PoolMetric::new(set, &cfg.spec)?;

    let mut steps = Vec::with_capacity(cfg.target_n);
    let mut current = set.clone();
    let already = current.selected().len();
    if already > cfg.target_n {
        return Err(Error::InvalidConfig(format!(
            "{already} views already selected, more than target_n ({})",
            cfg.target_n
        )));
    }

    if already < cfg.initial_k {
        let seeds = match &cfg.initial_ids {
            Some(ids) => ids
                .iter()
                .map(|id| current.index_of(id))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .filter(|&i| !current.is_selected(i))
                .take(cfg.initial_k - already)
                .collect(),
            None => initial_picks(&current, cfg.initial_k - already, &mut rng_from_seed(cfg.seed)),
        };
        current = current.with_selected(&seeds)?;
        steps.extend(seeds.iter().map(|&view| FvsStep {
            view,
            min_distance: None,
        }));
    }

    let mut candidates = current.candidates();
    let selected = current.selected().to_vec();
    let mut nearest: Vec<f64> = cfg.exec.map_slice(&candidates, |&c| {
        selected
            .iter()
            .map(|&s| metric.distance(c, s))
            .fold(f64::INFINITY, f64::min)
    });

    let mut picks = Vec::new();
    while current.selected().len() + picks.len() < cfg.target_n {
        let best = argmax_with_tiebreak(&candidates, &nearest, &current, cfg.exec);
        let view = candidates.swap_remove(best);
        let d = nearest.swap_remove(best);
        steps.push(FvsStep {
            view,
            min_distance: Some(d),
        });
        picks.push(view);
        let cands = &candidates;
        cfg.exec.for_each_mut(&mut nearest, |i, slot| {
            let d = metric.distance(cands[i], view);
            if d < *slot {
                *slot = d;
            }
        });
    }
    Ok((current.with_selected(&picks)?, steps))
}

/// Position of the candidate with the largest cached distance; ties go to
/// the lexicographically smallest view id.
fn argmax_with_tiebreak(candidates: &[usize], nearest: &[f64], set: &ViewSet, exec: Exec) -> usize {
    let better = |a: (usize, f64), b: (usize, f64)| -> (usize, f64) {
        match a.1.total_cmp(&b.1) {
            std::cmp::Ordering::Greater => a,
            std::cmp::Ordering::Less => b,
            std::cmp::Ordering::Equal => {
                if set.lex_rank(candidates[a.0]) <= set.lex_rank(candidates[b.0]) {
                    a
                } else {
                    b
                }
            }
        }
    };
    // Chunked reduction: each chunk scans sequentially, chunk winners are
    // combined with the same total order, so the result never depends on
    // the thread count.
    exec.map_chunks(candidates.len(), 4096, |range| {
        range.map(|i| (i, nearest[i])).reduce(better).expect("non-empty chunk")
    })
    .into_iter()
    .reduce(better)
    .expect("at least one candidate")
    .0
}

/// Smallest pairwise distance among the selected views.
pub fn maximin_radius(set: &ViewSet, spec: &DistanceSpec) -> Result<f64> {
    let selected = set.selected();
    if selected.len() < 2 {
        return Err(Error::TooFewSelected(selected.len()));
    }
    let metric = PoolMetric::new(set, spec)?;
    let mut best = f64::INFINITY;
    for (a, &i) in selected.iter().enumerate() {
        for &j in &selected[a + 1..] {
            best = best.min(metric.distance(i, j));
        }
    }
    Ok(best)
}

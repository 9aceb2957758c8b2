//! Rank-based Zipf sampler with exponential weighting.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::compensated_sum;

use super::ErrorRanking;

/// Probability of each rank (index 0 = worst quality):
/// `f_r ∝ exp(−γ · r / (q − 1))`.
///
/// Normalized in log space so large `γ` cannot underflow the leading term.
pub fn zipf_pmf(q: usize, gamma: f64) -> Result<Vec<f64>> {
    if q == 0 {
        return Err(Error::DrawExceedsPool {
            requested: 1,
            available: 0,
        });
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "gamma must be finite and positive, got {gamma}"
        )));
    }
    if q == 1 {
        return Ok(vec![1.0]);
    }
    let scale = gamma / (q - 1) as f64;
    // Largest logit is 0 at rank 0, so exp never overflows.
    let weights: Vec<f64> = (0..q).map(|r| (-scale * r as f64).exp()).collect();
    let total = compensated_sum(weights.iter().copied());
    Ok(weights.into_iter().map(|w| w / total).collect())
}

/// `zipf_pmf` for a ranking, indexed by rank.
pub fn zipf_pmf_for(ranking: &ErrorRanking, gamma: f64) -> Result<Vec<f64>> {
    zipf_pmf(ranking.len(), gamma)
}

/// Draws `l` distinct positions from `weights` one at a time, renormalizing
/// over what is left after each draw.
pub fn weighted_draw_without_replacement<R: Rng + ?Sized>(
    weights: &[f64],
    l: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if l > weights.len() {
        return Err(Error::DrawExceedsPool {
            requested: l,
            available: weights.len(),
        });
    }
    let mut remaining: Vec<usize> = (0..weights.len()).collect();
    let mut out = Vec::with_capacity(l);
    for _ in 0..l {
        let total = compensated_sum(remaining.iter().map(|&i| weights[i]));
        let pos = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = remaining.len() - 1;
            for (p, &i) in remaining.iter().enumerate() {
                acc += weights[i];
                if target < acc {
                    pick = p;
                    break;
                }
            }
            // Trailing zero weights must never be picked through rounding.
            while weights[remaining[pick]] == 0.0 && pick > 0 {
                pick -= 1;
            }
            pick
        } else {
            rng.random_range(0..remaining.len())
        };
        out.push(remaining.remove(pos));
    }
    Ok(out)
}

/// Draws `l` distinct view indices from the ranking under the Zipf pmf.
pub fn zipf_draw<R: Rng + ?Sized>(ranking: &ErrorRanking, gamma: f64, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    if l > ranking.len() {
        return Err(Error::DrawExceedsPool {
            requested: l,
            available: ranking.len(),
        });
    }
    if l == 0 {
        return Ok(Vec::new());
    }
    let pmf = zipf_pmf(ranking.len(), gamma)?;
    let ranks = weighted_draw_without_replacement(&pmf, l, rng)?;
    Ok(ranks.into_iter().map(|r| ranking.order()[r]).collect())
}

//! Uniform random selection, the baseline every sampler is compared against.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scene::ViewSet;

/// Seeded generator used throughout the crate.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A uniformly random permutation of `0..len`.
pub fn random_order<R: rand::Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<usize> {
    let mut order: Vec<usize> = (0..len).collect();
    order.shuffle(rng);
    order
}

/// Selects `n` views uniformly at random. The choice for `n` is a prefix of
/// the choice for any larger `n` under the same seed, and matches the random
/// initial views drawn by the farthest-view and information-gain samplers.
pub fn random_select(set: &ViewSet, n: usize, seed: u64) -> Result<ViewSet> {
    let candidates = set.candidates();
    if n > candidates.len() {
        return Err(Error::BudgetExceedsPool {
            requested: n,
            available: candidates.len(),
        });
    }
    let picks = initial_picks(set, n, &mut rng_from_seed(seed));
    set.with_selected(&picks)
}

/// First `k` entries of a random permutation of the current candidates.
pub(crate) fn initial_picks<R: rand::Rng + ?Sized>(set: &ViewSet, k: usize, rng: &mut R) -> Vec<usize> {
    let candidates = set.candidates();
    random_order(candidates.len(), rng)
        .into_iter()
        .take(k)
        .map(|i| candidates[i])
        .collect()
}

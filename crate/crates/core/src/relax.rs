//! Lloyd relaxation of newly proposed views.
//!
//! The target measure is a discrete uniform cloud over either the unit
//! sphere or the convex hull of all camera centers. Each iteration assigns
//! every atom to its nearest center (already-selected views and proposals
//! alike) and moves only the proposals to the barycenter of their cells.
//! Selected views never move.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::uniform_on_sphere;
use crate::hull::ConvexHull;
use crate::par::Exec;
use crate::scene::{Vec3, ViewSet};

/// Atoms per reduction chunk; fixed so sums do not depend on thread count.
const CHUNK: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Sphere,
    ConvexHull,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LloydConfig {
    pub domain: Domain,
    pub n_iter: usize,
    pub support_samples: usize,
    pub seed: u64,
    #[serde(skip)]
    pub exec: Exec,
}

impl Default for LloydConfig {
    fn default() -> Self {
        LloydConfig {
            domain: Domain::Sphere,
            n_iter: 8,
            support_samples: 20_000,
            seed: 0,
            exec: Exec::default(),
        }
    }
}

impl LloydConfig {
    pub fn new(domain: Domain) -> Self {
        LloydConfig {
            domain,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_iter == 0 {
            return Err(Error::InvalidConfig("Lloyd iterations must be at least 1".into()));
        }
        if self.support_samples == 0 {
            return Err(Error::InvalidConfig("support sample count must be positive".into()));
        }
        Ok(())
    }
}

/// Uniform atoms over the relaxation domain of `views`.
pub fn sample_support<R: rand::Rng + ?Sized>(views: &ViewSet, cfg: &LloydConfig, rng: &mut R) -> Result<Vec<Vec3>> {
    cfg.validate()?;
    match cfg.domain {
        Domain::Sphere => {
            if let Some(v) = views.views().iter().find(|v| (v.center().norm() - 1.0).abs() > 1e-6) {
                return Err(Error::NotOnSphere(v.id().to_string()));
            }
            Ok((0..cfg.support_samples).map(|_| uniform_on_sphere(rng)).collect())
        }
        Domain::ConvexHull => {
            let hull = ConvexHull::new(&views.centers())?;
            let (lo, hi) = hull.bounds();
            let span = hi - lo;
            let mut out = Vec::with_capacity(cfg.support_samples);
            let max_attempts = cfg.support_samples.saturating_mul(10_000).max(1_000_000);
            let mut attempts = 0usize;
            while out.len() < cfg.support_samples {
                attempts += 1;
                if attempts > max_attempts {
                    return Err(Error::DegenerateHull);
                }
                let p = lo + span.component_mul(&Vec3::new(rng.random(), rng.random(), rng.random()));
                if hull.contains(&p) {
                    out.push(p);
                }
            }
            Ok(out)
        }
    }
}

fn nearest_center(x: &Vec3, centers: &[Vec3]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (i, c) in centers.iter().enumerate() {
        let d = (x - c).norm_squared();
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Sum of squared distances from every atom to its nearest center.
pub fn quantization_energy(centers: &[Vec3], support: &[Vec3], exec: Exec) -> f64 {
    exec.map_chunks(support.len(), CHUNK, |range| {
        support[range].iter().map(|x| nearest_center(x, centers).1).sum::<f64>()
    })
    .into_iter()
    .sum()
}

/// Relaxed proposal positions. See [`lloyd_relax_traced`].
pub fn lloyd_relax(fixed: &[Vec3], proposals: &[Vec3], support: &[Vec3], cfg: &LloydConfig) -> Result<Vec<Vec3>> {
    Ok(lloyd_relax_traced(fixed, proposals, support, cfg)?.0)
}

/// Runs `cfg.n_iter` Lloyd steps and also returns the quantization energy
/// before the first step and after each step.
pub fn lloyd_relax_traced(
    fixed: &[Vec3],
    proposals: &[Vec3],
    support: &[Vec3],
    cfg: &LloydConfig,
) -> Result<(Vec<Vec3>, Vec<f64>)> {
    cfg.validate()?;
    if fixed.is_empty() && proposals.is_empty() {
        return Err(Error::InvalidConfig("relaxation needs at least one center".into()));
    }
    if support.is_empty() {
        return Err(Error::InvalidConfig("relaxation support is empty".into()));
    }
    let exec = cfg.exec;
    let k = fixed.len();
    let mut centers: Vec<Vec3> = fixed.iter().chain(proposals).copied().collect();
    let mut energies = vec![quantization_energy(&centers, support, exec)];

    for _ in 0..cfg.n_iter {
        let partials = exec.map_chunks(support.len(), CHUNK, |range| {
            let mut sums = vec![Vec3::zeros(); centers.len()];
            let mut counts = vec![0usize; centers.len()];
            for x in &support[range] {
                let (c, _) = nearest_center(x, &centers);
                sums[c] += x;
                counts[c] += 1;
            }
            (sums, counts)
        });
        let mut sums = vec![Vec3::zeros(); centers.len()];
        let mut counts = vec![0usize; centers.len()];
        for (s, c) in partials {
            for i in 0..centers.len() {
                sums[i] += s[i];
                counts[i] += c[i];
            }
        }
        for i in k..centers.len() {
            if counts[i] == 0 {
                continue;
            }
            let mean = sums[i] / counts[i] as f64;
            centers[i] = match cfg.domain {
                Domain::ConvexHull => mean,
                Domain::Sphere => {
                    let n = mean.norm();
                    if n > 1e-12 {
                        mean / n
                    } else {
                        centers[i]
                    }
                }
            };
        }
        energies.push(quantization_energy(&centers, support, exec));
    }
    Ok((centers.split_off(k), energies))
}

/// Maps relaxed positions to distinct unselected views of `set`, greedily in
/// order: each position takes the nearest view still available (ties go to
/// the smaller id).
pub fn snap_to_candidates(relaxed: &[Vec3], set: &ViewSet) -> Result<Vec<usize>> {
    let mut available = set.candidates();
    if relaxed.len() > available.len() {
        return Err(Error::PoolExhausted {
            requested: relaxed.len(),
            available: available.len(),
        });
    }
    let mut out = Vec::with_capacity(relaxed.len());
    for p in relaxed {
        let (pos, _) = available
            .iter()
            .enumerate()
            .map(|(pos, &i)| (pos, (set.view(i).center() - p).norm_squared()))
            .min_by(|a, b| {
                a.1.total_cmp(&b.1)
                    .then_with(|| set.lex_rank(available[a.0]).cmp(&set.lex_rank(available[b.0])))
            })
            .expect("checked non-empty");
        out.push(available.remove(pos));
    }
    Ok(out)
}

//! Mixture-of-von-Mises–Fisher sampler on the unit sphere.
//!
//! Each measured candidate contributes one component centered on its camera
//! position. Mixture weights are a temperature softmax of the min-max
//! normalized inverse quality, so the worst view carries the largest weight.
//! A sampled direction is snapped to the nearest candidate; snapping onto a
//! view already drawn in the same call is rejected and redrawn.

use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{compensated_sum, orthonormal_basis};
use crate::scene::Vec3;

use super::zipf::weighted_draw_without_replacement;

/// Softmax weights `exp(m̂_i/σ) / Σ exp(m̂_j/σ)` with
/// `m̂_i = (max m − m_i) / (max m − min m)`. Equal scores give uniform weights.
pub fn mvmf_weights(scores: &[f64], sigma: f64) -> Result<Vec<f64>> {
    if scores.is_empty() {
        return Err(Error::DrawExceedsPool {
            requested: 1,
            available: 0,
        });
    }
    if !(sigma > 0.0) || sigma.is_nan() {
        return Err(Error::InvalidConfig(format!("sigma must be positive, got {sigma}")));
    }
    let q = scores.len();
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = max - min;
    if !(spread > 0.0) || sigma.is_infinite() {
        return Ok(vec![1.0 / q as f64; q]);
    }
    let logits: Vec<f64> = scores.iter().map(|m| (max - m) / spread / sigma).collect();
    let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - top).exp()).collect();
    let total = compensated_sum(exps.iter().copied());
    Ok(exps.into_iter().map(|e| e / total).collect())
}

/// One draw from vMF(`mean`, `kappa`) on S².
///
/// The cosine to the mean is drawn by inverting its CDF,
/// `w = 1 + ln(1 + (1 − u)·(e^{−2κ} − 1)) / κ`, written with `ln_1p`/`exp_m1`
/// so both tiny and huge `κ` stay accurate; the azimuth is uniform.
pub fn vmf_sample<R: Rng + ?Sized>(mean: &Vec3, kappa: f64, rng: &mut R) -> Vec3 {
    debug_assert!(kappa > 0.0);
    let u: f64 = rng.random();
    let w = (1.0 + ((1.0 - u) * (-2.0 * kappa).exp_m1()).ln_1p() / kappa).clamp(-1.0, 1.0);
    let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
    let (e1, e2) = orthonormal_basis(mean);
    let r = (1.0 - w * w).max(0.0).sqrt();
    (mean * w + (e1 * phi.cos() + e2 * phi.sin()) * r).normalize()
}

/// Expected cosine to the mean, `coth κ − 1/κ`.
pub fn mean_resultant_length(kappa: f64) -> f64 {
    if kappa < 1e-4 {
        return kappa / 3.0;
    }
    1.0 / kappa.tanh() - 1.0 / kappa
}

/// Index into `centers` of the point closest to `x` (largest dot product);
/// ties go to the smaller `tiebreak` key.
pub fn snap_to_nearest(x: &Vec3, centers: &[Vec3], tiebreak: &[usize]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, c) in centers.iter().enumerate() {
        let d = c.dot(x);
        let better = match best {
            None => true,
            Some((bi, bd)) => d > bd || (d == bd && tiebreak[i] < tiebreak[bi]),
        };
        if better {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i)
}

/// Inputs to one mixture draw, all indexed by candidate position.
pub struct MvmfDraw<'a> {
    /// Unit-norm candidate centers.
    pub centers: &'a [Vec3],
    /// Quality scores, higher is better.
    pub scores: &'a [f64],
    /// Candidate positions ordered worst first, used for the fallback fill.
    pub worst_first: &'a [usize],
    /// Tie-break key per candidate (smaller wins).
    pub tiebreak: &'a [usize],
    pub kappa: f64,
    pub sigma: f64,
}

/// Draws `l` distinct candidate positions. Repeated snaps are rejected and
/// redrawn; after `10·l·q` attempts the rest is filled worst-first.
pub fn mvmf_draw<R: Rng + ?Sized>(input: &MvmfDraw<'_>, l: usize, rng: &mut R) -> Result<Vec<usize>> {
    let q = input.centers.len();
    if l > q {
        return Err(Error::DrawExceedsPool {
            requested: l,
            available: q,
        });
    }
    if !(input.kappa > 0.0 && input.kappa.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "kappa must be finite and positive, got {}",
            input.kappa
        )));
    }
    for c in input.centers {
        if (c.norm() - 1.0).abs() > 1e-6 {
            return Err(Error::NotOnSphere(format!("center {c:?}")));
        }
    }
    let alpha = mvmf_weights(input.scores, input.sigma)?;
    let mut taken = vec![false; q];
    let mut out = Vec::with_capacity(l);
    let budget = 10 * l * q;
    let mut attempts = 0;
    while out.len() < l && attempts < budget {
        attempts += 1;
        let component = weighted_draw_without_replacement(&alpha, 1, rng)?[0];
        let x = vmf_sample(&input.centers[component], input.kappa, rng);
        let idx = snap_to_nearest(&x, input.centers, input.tiebreak).expect("q > 0");
        if !taken[idx] {
            taken[idx] = true;
            out.push(idx);
        }
    }
    for &idx in input.worst_first {
        if out.len() == l {
            break;
        }
        if !taken[idx] {
            taken[idx] = true;
            out.push(idx);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::rng_from_seed;
    use std::f64::consts::E;

    #[test]
    fn weights_closed_form() {
        let a = mvmf_weights(&[10.0, 20.0], 1.0).unwrap();
        assert!((a[0] - E / (E + 1.0)).abs() < 1e-15);
        assert!((a[1] - 1.0 / (E + 1.0)).abs() < 1e-15);
        assert!((a[0] - 0.7311).abs() < 1e-4);
    }

    #[test]
    fn equal_scores_and_hot_temperature_are_uniform() {
        assert_eq!(mvmf_weights(&[3.0; 4], 0.5).unwrap(), vec![0.25; 4]);
        let a = mvmf_weights(&[1.0, 5.0, 9.0], 1e9).unwrap();
        assert!(a.iter().all(|w| (w - 1.0 / 3.0).abs() < 1e-6));
    }

    #[test]
    fn worst_view_has_largest_weight() {
        let a = mvmf_weights(&[4.0, 1.0, 7.0, 3.0], 0.3).unwrap();
        let arg = (0..4).max_by(|&i, &j| a[i].total_cmp(&a[j])).unwrap();
        assert_eq!(arg, 1);
        assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huge_kappa_returns_the_mean() {
        let mut rng = rng_from_seed(2);
        let mean = Vec3::new(0.3, -0.4, 0.5).normalize();
        for _ in 0..100 {
            let x = vmf_sample(&mean, 1e8, &mut rng);
            assert!(x.dot(&mean).clamp(-1.0, 1.0).acos() < 1e-3);
            assert!((x.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn concentrated_mixture_snaps_to_its_own_view() {
        let centers = vec![Vec3::x(), Vec3::y(), Vec3::z(), -Vec3::x()];
        // Only candidate 2 has low quality; σ tiny puts all mass on it.
        let scores = [5.0, 5.0, 0.0, 5.0];
        let input = MvmfDraw {
            centers: &centers,
            scores: &scores,
            worst_first: &[2, 0, 1, 3],
            tiebreak: &[0, 1, 2, 3],
            kappa: 1e6,
            sigma: 1e-3,
        };
        let mut rng = rng_from_seed(4);
        for _ in 0..50 {
            assert_eq!(mvmf_draw(&input, 1, &mut rng).unwrap(), vec![2]);
        }
        // Two draws: component 2 keeps snapping to itself until the attempt
        // budget runs out, then the worst-first fill supplies the next view.
        assert_eq!(mvmf_draw(&input, 2, &mut rng).unwrap(), vec![2, 0]);
    }

    #[test]
    fn rejects_off_sphere_centers() {
        let centers = vec![Vec3::x() * 2.0, Vec3::y()];
        let input = MvmfDraw {
            centers: &centers,
            scores: &[1.0, 2.0],
            worst_first: &[0, 1],
            tiebreak: &[0, 1],
            kappa: 1.0,
            sigma: 1.0,
        };
        assert!(matches!(
            mvmf_draw(&input, 1, &mut rng_from_seed(0)),
            Err(Error::NotOnSphere(_))
        ));
    }

    #[test]
    fn resultant_length_limits() {
        assert!((mean_resultant_length(5.0) - 0.8000).abs() < 1e-3);
        assert!(mean_resultant_length(1e-9) < 1e-9);
    }
}

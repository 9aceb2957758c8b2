//! Synthetic quality oracle on the unit sphere.
//!
//! A candidate's score rises with nearby training views and drops near
//! "hotspots" of scene difficulty; the hotspot penalty decays as more
//! training views land inside it, so piling views onto one hotspot has
//! diminishing returns.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, EvaluatorError, Result};
use crate::metrics::d_gc;
use crate::par::Exec;
use crate::random::rng_from_seed;
use crate::scene::{CameraView, QualityReport, Vec3, ViewSet};

use super::Evaluator;

/// Width of the training-view kernel `exp(−d²/0.25)`.
const KERNEL_WIDTH_SQ: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    pub center: Vec3,
    pub difficulty: f64,
    /// Angular radius in radians.
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleParams {
    pub hotspots: Vec<Hotspot>,
    pub base_quality: f64,
    pub gain_per_view: f64,
    pub noise_sd: f64,
    pub seed: u64,
}

impl Default for OracleParams {
    /// One hard region around +z.
    fn default() -> Self {
        OracleParams {
            hotspots: vec![Hotspot {
                center: Vec3::z(),
                difficulty: 5.0,
                radius: 0.7,
            }],
            base_quality: 0.0,
            gain_per_view: 1.0,
            noise_sd: 0.0,
            seed: 0,
        }
    }
}

impl OracleParams {
    pub fn validate(&self) -> Result<()> {
        for h in &self.hotspots {
            if (h.center.norm() - 1.0).abs() > 1e-6 {
                return Err(Error::NotUnit(h.center.norm()));
            }
            if !(h.radius > 0.0 && h.radius < std::f64::consts::PI) {
                return Err(Error::InvalidConfig(format!(
                    "hotspot radius {} outside (0, π)",
                    h.radius
                )));
            }
            if !(h.difficulty > 0.0 && h.difficulty.is_finite()) {
                return Err(Error::InvalidConfig(format!(
                    "hotspot difficulty must be positive, got {}",
                    h.difficulty
                )));
            }
        }
        if !(self.gain_per_view > 0.0 && self.gain_per_view.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "gain_per_view must be positive, got {}",
                self.gain_per_view
            )));
        }
        if !(self.noise_sd >= 0.0 && self.noise_sd.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "noise_sd must be non-negative, got {}",
                self.noise_sd
            )));
        }
        if !self.base_quality.is_finite() {
            return Err(Error::InvalidConfig("base_quality must be finite".into()));
        }
        Ok(())
    }
}

/// FNV-1a, used to derive a per-score noise seed that is stable across builds.
fn fnv1a(bytes: impl IntoIterator<Item = u8>, mut h: u64) -> u64 {
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

fn noise_seed(seed: u64, candidate: &str, selected: &[&str]) -> u64 {
    let mut h = fnv1a(seed.to_le_bytes(), 0xcbf2_9ce4_8422_2325);
    h = fnv1a(candidate.bytes().chain([0xff]), h);
    let mut sorted = selected.to_vec();
    sorted.sort_unstable();
    for id in sorted {
        h = fnv1a(id.bytes().chain([0xfe]), h);
    }
    h
}

/// Scores `candidates` given the training views `selected`.
pub fn oracle_score_views(
    selected: &[&CameraView],
    candidates: &[&CameraView],
    params: &OracleParams,
    exec: Exec,
) -> Result<QualityReport> {
    for v in selected.iter().chain(candidates) {
        if (v.center().norm() - 1.0).abs() > 1e-6 {
            return Err(Error::NotOnSphere(v.id().to_string()));
        }
    }
    let sel_centers: Vec<Vec3> = selected.iter().map(|v| *v.center()).collect();
    let sel_ids: Vec<&str> = selected.iter().map(|v| v.id()).collect();
    // n_near per hotspot depends only on the selection.
    let decay: Vec<f64> = params
        .hotspots
        .iter()
        .map(|h| {
            let near = sel_centers
                .iter()
                .filter(|s| d_gc(s, &h.center).unwrap_or(f64::INFINITY) <= h.radius)
                .count();
            1.0 / (1.0 + near as f64)
        })
        .collect();

    let scores = exec.map_slice(candidates, |c| {
        let x = c.center();
        let gain: f64 = sel_centers
            .iter()
            .map(|s| (-d_gc(x, s).unwrap().powi(2) / KERNEL_WIDTH_SQ).exp())
            .sum();
        let penalty: f64 = params
            .hotspots
            .iter()
            .zip(&decay)
            .map(|(h, dk)| h.difficulty * (-d_gc(x, &h.center).unwrap().powi(2) / (h.radius * h.radius)).exp() * dk)
            .sum();
        let noise = if params.noise_sd > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng_from_seed(noise_seed(params.seed, c.id(), &sel_ids)));
            params.noise_sd * z
        } else {
            0.0
        };
        (
            c.id().to_string(),
            params.base_quality + params.gain_per_view * gain - penalty + noise,
        )
    });
    Ok(QualityReport::new(scores.into_iter().collect()))
}

/// Oracle scores for every candidate of `set` under its current selection.
pub fn oracle_scores(set: &ViewSet, params: &OracleParams) -> Result<QualityReport> {
    let selected: Vec<&CameraView> = set.selected().iter().map(|&i| set.view(i)).collect();
    let candidates: Vec<&CameraView> = set.candidates().into_iter().map(|i| set.view(i)).collect();
    oracle_score_views(&selected, &candidates, params, Exec::default())
}

#[derive(Debug, Clone)]
pub struct SyntheticOracle {
    params: OracleParams,
    exec: Exec,
}

impl SyntheticOracle {
    pub fn new(params: OracleParams) -> Result<Self> {
        params.validate()?;
        Ok(SyntheticOracle {
            params,
            exec: Exec::default(),
        })
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn params(&self) -> &OracleParams {
        &self.params
    }
}

impl Evaluator for SyntheticOracle {
    fn evaluate(&mut self, _round: usize, set: &ViewSet) -> std::result::Result<QualityReport, EvaluatorError> {
        let selected: Vec<&CameraView> = set.selected().iter().map(|&i| set.view(i)).collect();
        let candidates: Vec<&CameraView> = set.candidates().into_iter().map(|i| set.view(i)).collect();
        oracle_score_views(&selected, &candidates, &self.params, self.exec)
            .map_err(|e| EvaluatorError::Failure(e.to_string()))
    }
}

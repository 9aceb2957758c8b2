//! Pairwise view distances.
//!
//! `d = d_spatial + α · d_photo`, where the spatial part is either the
//! great-circle angle between unit-sphere centers or the squared Euclidean
//! distance between centers, and the photogrammetric part is
//! `1 − A_ij / max(A)` over the co-visibility counts. The addends carry
//! different units; α absorbs the scale.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scene::{CameraView, CovisibilityMatrix, Vec3, ViewSet};

const UNIT_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spatial {
    GreatCircle,
    Euclidean,
}

#[derive(Debug, Clone)]
pub struct DistanceSpec {
    pub spatial: Spatial,
    pub photo_weight: f64,
    pub covisibility: Option<Arc<CovisibilityMatrix>>,
    /// Divide the spatial term by its maximum over the pool.
    pub normalize_spatial: bool,
}

impl DistanceSpec {
    pub fn spatial_only(spatial: Spatial) -> Self {
        DistanceSpec {
            spatial,
            photo_weight: 0.0,
            covisibility: None,
            normalize_spatial: false,
        }
    }

    pub fn with_photo(mut self, weight: f64, covisibility: Arc<CovisibilityMatrix>) -> Self {
        self.photo_weight = weight;
        self.covisibility = Some(covisibility);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.photo_weight >= 0.0 && self.photo_weight.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "photo weight must be finite and non-negative, got {}",
                self.photo_weight
            )));
        }
        if self.photo_weight > 0.0 && self.covisibility.is_none() {
            return Err(Error::InvalidConfig(
                "a positive photo weight requires a co-visibility matrix".into(),
            ));
        }
        Ok(())
    }
}

fn check_unit(v: &Vec3) -> Result<()> {
    let n = v.norm();
    if (n - 1.0).abs() > UNIT_TOLERANCE {
        return Err(Error::NotUnit(n));
    }
    Ok(())
}

/// Great-circle angle in radians between two unit vectors.
pub fn d_gc(a: &Vec3, b: &Vec3) -> Result<f64> {
    check_unit(a)?;
    check_unit(b)?;
    Ok(a.dot(b).clamp(-1.0, 1.0).acos())
}

/// Squared Euclidean distance. Not a metric (no triangle inequality).
pub fn d_euc(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm_squared()
}

/// `1 − A_ij / max(A)` with the maximum taken off the diagonal.
pub fn d_photo(i: &str, j: &str, covisibility: &CovisibilityMatrix) -> Result<f64> {
    let (a, b) = (covisibility.index_of(i)?, covisibility.index_of(j)?);
    let max = covisibility.max_off_diagonal();
    if max == 0 {
        return Err(Error::EmptyCovisibility);
    }
    Ok(photo_from_counts(covisibility.get(a, b), max))
}

fn photo_from_counts(count: u64, max: u64) -> f64 {
    1.0 - count as f64 / max as f64
}

fn spatial(kind: Spatial, a: &Vec3, b: &Vec3) -> Result<f64> {
    match kind {
        Spatial::GreatCircle => d_gc(a, b),
        Spatial::Euclidean => Ok(d_euc(a, b)),
    }
}

/// Combined distance between two views; zero for the same id.
pub fn view_distance(u: &CameraView, v: &CameraView, spec: &DistanceSpec) -> Result<f64> {
    spec.validate()?;
    if u.id() == v.id() {
        return Ok(0.0);
    }
    let mut d = spatial(spec.spatial, u.center(), v.center())?;
    if spec.photo_weight > 0.0 {
        let a = spec.covisibility.as_deref().expect("validated");
        d += spec.photo_weight * d_photo(u.id(), v.id(), a)?;
    }
    Ok(d)
}

/// Distance evaluator bound to one pool: resolves co-visibility rows and the
/// optional spatial normalizer once, then answers `distance(i, j)` on view
/// indices without re-validating.
#[derive(Debug, Clone)]
pub struct PoolMetric {
    centers: Vec<Vec3>,
    spatial: Spatial,
    spatial_scale: f64,
    photo: Option<PhotoTerm>,
}

#[derive(Debug, Clone)]
struct PhotoTerm {
    weight: f64,
    rows: Vec<usize>,
    matrix: Arc<CovisibilityMatrix>,
    max: u64,
}

impl PoolMetric {
    pub fn new(set: &ViewSet, spec: &DistanceSpec) -> Result<Self> {
        spec.validate()?;
        let centers = set.centers();
        if spec.spatial == Spatial::GreatCircle {
            for c in &centers {
                check_unit(c)?;
            }
        }
        let photo = if spec.photo_weight > 0.0 {
            let matrix = spec.covisibility.clone().expect("validated");
            let rows = set
                .views()
                .iter()
                .map(|v| matrix.index_of(v.id()))
                .collect::<Result<Vec<_>>>()?;
            let max = matrix.max_off_diagonal();
            if max == 0 {
                return Err(Error::EmptyCovisibility);
            }
            Some(PhotoTerm {
                weight: spec.photo_weight,
                rows,
                matrix,
                max,
            })
        } else {
            None
        };
        let mut metric = PoolMetric {
            centers,
            spatial: spec.spatial,
            spatial_scale: 1.0,
            photo,
        };
        if spec.normalize_spatial {
            let n = metric.centers.len();
            let mut max = 0.0_f64;
            for i in 0..n {
                for j in (i + 1)..n {
                    max = max.max(metric.spatial_raw(i, j));
                }
            }
            if max > 0.0 {
                metric.spatial_scale = 1.0 / max;
            }
        }
        Ok(metric)
    }

    fn spatial_raw(&self, i: usize, j: usize) -> f64 {
        let (a, b) = (&self.centers[i], &self.centers[j]);
        match self.spatial {
            Spatial::GreatCircle => a.dot(b).clamp(-1.0, 1.0).acos(),
            Spatial::Euclidean => d_euc(a, b),
        }
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let mut d = self.spatial_raw(i, j) * self.spatial_scale;
        if let Some(p) = &self.photo {
            d += p.weight * photo_from_counts(p.matrix.get(p.rows[i], p.rows[j]), p.max);
        }
        d
    }
}

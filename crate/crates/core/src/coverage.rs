//! Ray-cast coverage density over a mesh surface.
//!
//! Every (strided) pixel of every camera casts one ray; its first hit on the
//! mesh is a coverage event. A surface sample's raw value is the number of
//! events within its ball of radius ℓ, scaled by `stride²` so strided runs
//! approximate full-resolution totals.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{compensated_sum, SpatialGrid};
use crate::mesh::{Ray, TriangleMesh};
use crate::par::Exec;
use crate::random::rng_from_seed;
use crate::scene::{CameraView, SurfaceSamples, Vec3};

/// Choice of the normalization constant κ_cov.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    /// Largest raw value, so normalized values lie in [0, 1].
    #[default]
    MaxCount,
    /// Total number of first hits (scaled by `stride²`).
    TotalHits,
    /// Total number of rays cast (scaled by `stride²`).
    RayBudget,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageOptions {
    pub stride: u32,
    pub normalization: Normalization,
    pub exec: Exec,
}

impl Default for CoverageOptions {
    fn default() -> Self {
        CoverageOptions {
            stride: 4,
            normalization: Normalization::MaxCount,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageField {
    pub samples: SurfaceSamples,
    /// Raw counts per sample, already multiplied by `stride²`.
    pub raw: Vec<f64>,
    /// κ_cov; always positive.
    pub kappa: f64,
    pub normalization: Normalization,
    pub rays_cast: u64,
    pub hits: u64,
    pub stride: u32,
}

impl CoverageField {
    pub fn normalized(&self) -> Vec<f64> {
        self.raw.iter().map(|r| r / self.kappa).collect()
    }

    /// Same samples, all values zero.
    pub fn zeros(samples: SurfaceSamples) -> Self {
        CoverageField {
            raw: vec![0.0; samples.len()],
            samples,
            kappa: 1.0,
            normalization: Normalization::MaxCount,
            rays_cast: 0,
            hits: 0,
            stride: 1,
        }
    }
}

/// Draws `m` points uniformly by area: a triangle with probability
/// proportional to its area, then uniform barycentric coordinates.
pub fn sample_surface(mesh: &TriangleMesh, m: usize, radius: f64, seed: u64) -> Result<SurfaceSamples> {
    if m == 0 {
        return Err(Error::InvalidConfig("sample count must be at least 1".into()));
    }
    let dist = WeightedIndex::new(mesh.areas()).map_err(|_| Error::EmptyMesh)?;
    let mut rng = rng_from_seed(seed);
    let mut points = Vec::with_capacity(m);
    let mut triangles = Vec::with_capacity(m);
    for _ in 0..m {
        let t = dist.sample(&mut rng);
        let [a, b, c] = mesh.corners(t);
        let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
        if u + v > 1.0 {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        points.push(a + (b - a) * u + (c - a) * v);
        triangles.push(t as u32);
    }
    SurfaceSamples::from_parts(points, triangles, radius, seed)
}

/// Twice the mean nearest-neighbour distance among `points`.
pub fn default_ball_radius(points: &[Vec3]) -> Result<f64> {
    if points.len() < 2 {
        return Err(Error::InvalidConfig(
            "need at least two samples to derive a ball radius".into(),
        ));
    }
    let (mut lo, mut hi) = (points[0], points[0]);
    for p in points {
        lo = lo.inf(p);
        hi = hi.sup(p);
    }
    let extent = (hi - lo).max().max(f64::MIN_POSITIVE);
    let cell = extent / (points.len() as f64).cbrt().max(1.0);
    let grid = SpatialGrid::new(points, cell);
    let dists = points
        .iter()
        .enumerate()
        .map(|(i, p)| grid.nearest(points, p, Some(i)).map_or(0.0, |(_, d)| d));
    let mean = compensated_sum(dists) / points.len() as f64;
    if !(mean > 0.0) {
        return Err(Error::InvalidConfig(
            "surface samples coincide; cannot derive a ball radius".into(),
        ));
    }
    Ok(2.0 * mean)
}

/// [`sample_surface`] with ℓ set by [`default_ball_radius`].
pub fn sample_surface_auto(mesh: &TriangleMesh, m: usize, seed: u64) -> Result<SurfaceSamples> {
    let probe = sample_surface(mesh, m, 1.0, seed)?;
    let radius = if m >= 2 {
        default_ball_radius(probe.points())?
    } else {
        mesh.total_area().sqrt()
    };
    probe.with_radius(radius)
}

/// Pixel centers visited at `stride`, row-major.
fn pixel_grid(width: u32, height: u32, stride: u32) -> impl Iterator<Item = (f64, f64)> {
    (0..height).step_by(stride as usize).flat_map(move |j| {
        (0..width)
            .step_by(stride as usize)
            .map(move |k| (k as f64 + 0.5, j as f64 + 0.5))
    })
}

/// Coverage of `samples` by every camera in `views` (a pool's views, or
/// just its selection).
pub fn coverage_measure(
    mesh: &TriangleMesh,
    samples: &SurfaceSamples,
    views: &[CameraView],
    opts: &CoverageOptions,
) -> Result<CoverageField> {
    if opts.stride == 0 {
        return Err(Error::InvalidConfig("pixel stride must be at least 1".into()));
    }
    for v in views {
        if v.intrinsics().is_none() {
            return Err(Error::MissingIntrinsics(v.id().to_string()));
        }
    }
    let radius = samples.radius();
    let grid = SpatialGrid::new(samples.points(), radius);

    // One count buffer per view; integer sums merge identically in any order.
    let per_view = opts.exec.map_slice(views, |view| {
        let k = view.intrinsics().expect("checked above");
        let mut counts = vec![0u64; samples.len()];
        let (mut rays, mut hits) = (0u64, 0u64);
        for (u, v) in pixel_grid(k.width, k.height, opts.stride) {
            rays += 1;
            let ray = Ray::new(*view.center(), view.pixel_direction(k, u, v));
            if let Some(hit) = mesh.first_hit(&ray) {
                hits += 1;
                grid.visit_within(samples.points(), &hit.point, radius, |i| counts[i] += 1);
            }
        }
        (counts, rays, hits)
    });

    let mut counts = vec![0u64; samples.len()];
    let (mut rays_cast, mut hits) = (0u64, 0u64);
    for (c, r, h) in per_view {
        for (acc, x) in counts.iter_mut().zip(c) {
            *acc += x;
        }
        rays_cast += r;
        hits += h;
    }
    let scale = (opts.stride as f64).powi(2);
    let raw: Vec<f64> = counts.iter().map(|&c| c as f64 * scale).collect();
    let kappa = match opts.normalization {
        Normalization::MaxCount => raw.iter().copied().fold(0.0, f64::max),
        Normalization::TotalHits => hits as f64 * scale,
        Normalization::RayBudget => rays_cast as f64 * scale,
    };
    Ok(CoverageField {
        samples: samples.clone(),
        raw,
        kappa: if kappa > 0.0 { kappa } else { 1.0 },
        normalization: opts.normalization,
        rays_cast,
        hits,
        stride: opts.stride,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverageDifference {
    /// `|a − b|` of the normalized fields, per sample.
    pub values: Vec<f64>,
    /// Pooled standard deviation of the two normalized fields.
    pub sigma: f64,
    /// Mean, std and max of `values` divided by `sigma` (left unscaled when `sigma` is 0).
    pub mean: f64,
    pub std: f64,
    pub max: f64,
}

pub fn coverage_difference(a: &CoverageField, b: &CoverageField) -> Result<CoverageDifference> {
    if !a.samples.same_identity(&b.samples) {
        return Err(Error::SampleMismatch);
    }
    let (na, nb) = (a.normalized(), b.normalized());
    let values: Vec<f64> = na.iter().zip(&nb).map(|(x, y)| (x - y).abs()).collect();
    let sigma = ((variance(&na) + variance(&nb)) / 2.0).sqrt();
    let unit = if sigma > 0.0 { sigma } else { 1.0 };
    let mean = mean(&values);
    Ok(CoverageDifference {
        sigma,
        mean: mean / unit,
        std: variance(&values).sqrt() / unit,
        max: values.iter().copied().fold(0.0, f64::max) / unit,
        values,
    })
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    compensated_sum(values.iter().copied()) / values.len() as f64
}

fn variance(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    compensated_sum(values.iter().map(|v| (v - m) * (v - m))) / values.len() as f64
}

/// Population variance of the normalized field (0 for fewer than two samples).
pub fn coverage_variance(field: &CoverageField) -> f64 {
    variance(&field.normalized())
}

/// Maps `t ∈ [0, 1]` to RGB by linear interpolation between five fixed
/// stops: dark purple (68,1,84), blue (59,82,139), teal (33,145,140),
/// green (94,201,98), yellow (253,231,37). Out-of-range input is clamped.
pub fn colormap(t: f64) -> [u8; 3] {
    const STOPS: [[f64; 3]; 5] = [
        [68.0, 1.0, 84.0],
        [59.0, 82.0, 139.0],
        [33.0, 145.0, 140.0],
        [94.0, 201.0, 98.0],
        [253.0, 231.0, 37.0],
    ];
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    let x = t * 4.0;
    let i = (x.floor() as usize).min(3);
    let f = x - i as f64;
    let mut out = [0u8; 3];
    for c in 0..3 {
        out[c] = (STOPS[i][c] + (STOPS[i + 1][c] - STOPS[i][c]) * f).round() as u8;
    }
    out
}

//! Test-split construction.
//!
//! Synthetic scenes get test cameras on a spherical Fibonacci lattice looking
//! at the object; real captures are re-split by farthest view sampling over
//! the union of their original train and test views.

use rand::Rng;

use crate::error::{Error, Result};
use crate::fvs::{fvs_select, FvsConfig};
use crate::geometry::rotation_z;
use crate::metrics::DistanceSpec;
use crate::random::rng_from_seed;
use crate::scene::{CameraView, Intrinsics, Mat3, Vec3, ViewSet};

/// Point `i` of the `n`-point spherical Fibonacci lattice on the unit sphere.
pub fn fibonacci_point(i: usize, n: usize) -> Vec3 {
    let golden_angle = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
    let r = (1.0 - z * z).max(0.0).sqrt();
    let phi = i as f64 * golden_angle;
    Vec3::new(r * phi.cos(), r * phi.sin(), z)
}

/// Camera-to-world rotation whose optical axis (−z) points from `eye` to
/// `target`, with +z as the up hint (+y when looking straight up or down).
pub fn look_at(eye: &Vec3, target: &Vec3) -> Result<Mat3> {
    let f = target - eye;
    if f.norm() < 1e-12 {
        return Err(Error::InvalidConfig("camera coincides with its look-at target".into()));
    }
    let f = f.normalize();
    let mut right = f.cross(&Vec3::z());
    if right.norm() < 1e-9 {
        right = f.cross(&Vec3::y());
    }
    let right = right.normalize();
    let up = right.cross(&f);
    Ok(Mat3::from_columns(&[right, up, -f]))
}

/// `count` cameras on a sphere of `radius` about `center`, all aimed at
/// `center`. Ids are `{prefix}{i:04}`.
pub fn uniform_sphere_poses(
    count: usize,
    radius: f64,
    center: &Vec3,
    intrinsics: Option<Intrinsics>,
    prefix: &str,
) -> Result<Vec<CameraView>> {
    if count == 0 {
        return Err(Error::InvalidConfig("pose count must be at least 1".into()));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidConfig(format!("radius must be positive, got {radius}")));
    }
    (0..count)
        .map(|i| {
            let eye = center + fibonacci_point(i, count) * radius;
            CameraView::new(format!("{prefix}{i:04}"), eye, look_at(&eye, center)?, intrinsics)
        })
        .collect()
}

/// `count` cameras clustered in a figure-eight band: longitude `A·sin t`,
/// latitude `B·sin 2t`, with `A = π/2`, `B = 0.4` rad and a seeded ±0.05 rad
/// jitter on both angles.
pub fn lemniscate_band_poses(
    count: usize,
    radius: f64,
    center: &Vec3,
    intrinsics: Option<Intrinsics>,
    seed: u64,
) -> Result<Vec<CameraView>> {
    if count == 0 {
        return Err(Error::InvalidConfig("pose count must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|i| {
            let t = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
            let lon = std::f64::consts::FRAC_PI_2 * t.sin() + rng.random_range(-0.05..0.05);
            let lat = 0.4 * (2.0 * t).sin() + rng.random_range(-0.05..0.05);
            let dir = Vec3::new(lat.cos() * lon.cos(), lat.cos() * lon.sin(), lat.sin());
            let eye = center + dir * radius;
            CameraView::new(format!("band{i:04}"), eye, look_at(&eye, center)?, intrinsics)
        })
        .collect()
}

/// Test/train partition of `pool`: the test ids are a farthest-view
/// selection of `count` views from one seeded random start; train is the rest.
pub fn fvs_resplit(pool: &ViewSet, count: usize, spec: &DistanceSpec, seed: u64) -> Result<(Vec<String>, Vec<String>)> {
    if count >= pool.len() {
        return Err(Error::BudgetExceedsPool {
            requested: count,
            available: pool.len() - 1,
        });
    }
    let picked = fvs_select(
        &pool.cleared(),
        &FvsConfig::new(count, spec.clone()).with_initial_k(1).with_seed(seed),
    )?;
    let test = picked.selected_ids().into_iter().map(String::from).collect();
    let train = picked.candidate_ids().into_iter().map(String::from).collect();
    Ok((test, train))
}

/// Every camera rotated by `angle` radians about the z axis through `pivot`.
pub fn rotate_views_z(set: &ViewSet, angle: f64, pivot: &Vec3) -> Result<ViewSet> {
    let rot = rotation_z(angle);
    let shift = pivot - rot * pivot;
    let views = set
        .views()
        .iter()
        .map(|v| v.transformed(&rot, &shift))
        .collect::<Result<Vec<_>>>()?;
    ViewSet::new(views)?.with_selected(set.selected())
}

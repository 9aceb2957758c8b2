//! Dataset loading and the checks that depend on camera geometry.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use viewdir_core::io::{read_colmap_text, read_transforms};
use viewdir_core::metrics::{DistanceSpec, Spatial};
use viewdir_core::{CovisibilityMatrix, Vec3, ViewSet};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Centers within this distance of the unit sphere count as on it.
pub const SPHERE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct Dataset {
    pub path: PathBuf,
    pub format: Format,
    pub set: ViewSet,
    pub covisibility: Option<Arc<CovisibilityMatrix>>,
}

/// A directory is a COLMAP text model; a file is a transforms file.
pub fn detect_format(path: &Path) -> Format {
    if path.is_dir() {
        Format::ColmapText
    } else {
        Format::Transforms
    }
}

pub fn load(path: &Path, format: Option<Format>) -> Result<Dataset, CliError> {
    let format = format.unwrap_or_else(|| detect_format(path));
    let (set, covisibility) = match format {
        Format::Transforms => (read_transforms(path)?, None),
        Format::ColmapText => {
            let (set, covis) = read_colmap_text(path)?;
            (set, Some(Arc::new(covis)))
        }
    };
    log::info!("loaded {} views from {}", set.len(), path.display());
    Ok(Dataset {
        path: path.to_path_buf(),
        format,
        set,
        covisibility,
    })
}

/// Loads `cfg.dataset`, projecting onto the unit sphere when requested.
pub fn load_from_config(cfg: &RunConfig) -> Result<Dataset, CliError> {
    let path = cfg
        .dataset
        .as_deref()
        .ok_or_else(|| CliError::Config("--dataset is required".into()))?;
    let mut ds = load(path, cfg.format)?;
    if cfg.project_sphere == Some(true) {
        ds.set = project_about_centroid(&ds.set)?;
    }
    Ok(ds)
}

/// Unit-sphere projection about the mean camera center.
pub fn project_about_centroid(set: &ViewSet) -> Result<ViewSet, CliError> {
    let centroid = set.centers().iter().fold(Vec3::zeros(), |a, c| a + c) / set.len() as f64;
    Ok(set.project_to_unit_sphere(&centroid)?)
}

/// Fails with a configuration error naming `what` unless every camera
/// center lies on the unit sphere.
pub fn require_unit_sphere(set: &ViewSet, what: &str) -> Result<(), CliError> {
    if set.on_unit_sphere(SPHERE_TOLERANCE) {
        return Ok(());
    }
    Err(CliError::Config(format!(
        "{what} requires camera centers on the unit sphere, but this rig is not spherical; \
         pass --project-sphere to project the centers about their centroid"
    )))
}

/// Distance for farthest view sampling. Fills the resolved `spatial`,
/// `alpha` and `normalize_spatial` into `cfg`.
///
/// The spatial term defaults to great-circle on a unit-sphere rig and
/// squared Euclidean otherwise. `alpha` must be given for COLMAP input
/// (0 turns the photogrammetric term off) and must be absent or 0 for
/// transforms input, which carries no co-visibility.
pub fn resolve_distance(cfg: &mut RunConfig, ds: &Dataset) -> Result<DistanceSpec, CliError> {
    let on_sphere = ds.set.on_unit_sphere(SPHERE_TOLERANCE);
    let spatial = cfg.spatial.unwrap_or(if on_sphere {
        Spatial::GreatCircle
    } else {
        Spatial::Euclidean
    });
    if spatial == Spatial::GreatCircle {
        require_unit_sphere(&ds.set, "great-circle distance")?;
    }
    let mut spec = DistanceSpec::spatial_only(spatial);
    spec.normalize_spatial = cfg.normalize_spatial.unwrap_or(false);
    match (&ds.covisibility, cfg.alpha) {
        (Some(_), None) => {
            return Err(CliError::Config(
                "COLMAP input needs --alpha, the weight of the photogrammetric distance (0 disables it)".into(),
            ))
        }
        (Some(covis), Some(alpha)) => {
            if alpha > 0.0 {
                spec = spec.with_photo(alpha, covis.clone());
            }
        }
        (None, Some(alpha)) if alpha != 0.0 => {
            return Err(CliError::Config(
                "--alpha needs a co-visibility matrix, which only COLMAP input provides".into(),
            ))
        }
        (None, _) => {}
    }
    spec.validate()?;
    cfg.spatial = Some(spatial);
    cfg.normalize_spatial = Some(spec.normalize_spatial);
    Ok(spec)
}

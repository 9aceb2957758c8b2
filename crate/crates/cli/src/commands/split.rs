use std::path::PathBuf;

use viewdir_core::io::{write_transforms, SelectionManifest};
use viewdir_core::split::{fvs_resplit, rotate_views_z, uniform_sphere_poses};
use viewdir_core::{Intrinsics, Vec3, ViewSet};

use crate::config::{RunConfig, SplitMode};
use crate::dataset;
use crate::error::CliError;

use super::{echo_value, ensure_out_dir, write_stamped};

pub const DEFAULT_COUNT: usize = 200;
pub const DEFAULT_RADIUS: f64 = 4.0;
/// Image size and horizontal field of view of generated cameras when no
/// template dataset is given.
pub const DEFAULT_IMAGE_SIZE: u32 = 800;
pub const DEFAULT_FOV_X: f64 = 0.6911112070083618;

/// Writes the split and returns the paths written.
///
/// `uniform-sphere` writes `test_transforms.json` and `split_test.json`;
/// `fvs-resplit` writes `split_test.json` and `split_train.json`. Each
/// angle of `rotate_z` (degrees) adds `test_rotz_{angle}.json`, the test
/// cameras rotated about the z axis through the split center.
pub fn run(mut cfg: RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mode = *cfg.split_mode.get_or_insert(SplitMode::UniformSphere);
    let seed = *cfg.resolved_seeds()?.first().expect("at least one seed");
    cfg.seeds = Some(vec![seed]);
    cfg.repetitions = None;
    let center = Vec3::from(*cfg.center.get_or_insert([0.0; 3]));
    let out = ensure_out_dir(&cfg)?;
    let mut written = Vec::new();

    let test: ViewSet = match mode {
        SplitMode::UniformSphere => {
            let count = *cfg.count.get_or_insert(DEFAULT_COUNT);
            let radius = *cfg.radius.get_or_insert(DEFAULT_RADIUS);
            let intrinsics = match &cfg.dataset {
                Some(_) => dataset::load_from_config(&cfg)?.set.views()[0].intrinsics().copied(),
                None => Some(Intrinsics::from_fov_x(
                    DEFAULT_IMAGE_SIZE,
                    DEFAULT_IMAGE_SIZE,
                    DEFAULT_FOV_X,
                )),
            };
            let views = uniform_sphere_poses(count, radius, &center, intrinsics, "test_")?;
            let ids: Vec<String> = views.iter().map(|v| v.id().to_string()).collect();
            if views.len() < 2 {
                return Err(CliError::Config("a uniform-sphere split needs at least 2 views".into()));
            }
            let set = ViewSet::new(views)?;
            let path = out.join("test_transforms.json");
            write_transforms(&path, &set)?;
            written.push(path);
            let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
            let manifest = SelectionManifest::new("uniform-sphere", seed, echo_value(&cfg)?, &ids);
            let path = out.join("split_test.json");
            write_stamped(manifest, &cfg, &path)?;
            written.push(path);
            set
        }
        SplitMode::FvsResplit => {
            let ds = dataset::load_from_config(&cfg)?;
            let count = cfg
                .count
                .ok_or_else(|| CliError::Config("fvs-resplit needs --count".into()))?;
            let spec = dataset::resolve_distance(&mut cfg, &ds)?;
            let (test, train) = fvs_resplit(&ds.set, count, &spec, seed)?;
            let echo = echo_value(&cfg)?;
            for (name, ids) in [("test", &test), ("train", &train)] {
                let ids: Vec<&str> = ids.iter().map(String::as_str).collect();
                let manifest = SelectionManifest::new(format!("fvs-resplit-{name}"), seed, echo.clone(), &ids);
                let path = out.join(format!("split_{name}.json"));
                write_stamped(manifest, &cfg, &path)?;
                written.push(path);
            }
            let indices = test
                .iter()
                .map(|id| ds.set.index_of(id))
                .collect::<Result<Vec<_>, _>>()?;
            if cfg.rotate_z.is_some() && indices.len() < 2 {
                return Err(CliError::Config("rotated sets need at least 2 test views".into()));
            }
            if cfg.rotate_z.is_none() {
                return Ok(written);
            }
            ds.set.subset(&indices)?
        }
    };

    for &deg in cfg.rotate_z.as_deref().unwrap_or(&[]) {
        let rotated = rotate_views_z(&test, deg.to_radians(), &center)?;
        let path = out.join(format!("test_rotz_{deg}.json"));
        write_transforms(&path, &rotated)?;
        written.push(path);
    }
    Ok(written)
}

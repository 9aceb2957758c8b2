use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use viewdir_core::coverage::{
    coverage_difference, coverage_measure, coverage_variance, sample_surface, sample_surface_auto, CoverageField,
    CoverageOptions,
};
use viewdir_core::io::{read_manifest, read_obj, write_coverage_ply, write_field};
use viewdir_core::mesh::TriangleMesh;
use viewdir_core::{CameraView, Vec3};

use crate::config::RunConfig;
use crate::dataset;
use crate::error::CliError;

use super::{ensure_out_dir, num};

pub const DEFAULT_SURFACE_SAMPLES: usize = 20_000;
pub const SUMMARY_HEADER: &str = "set,mean,variance,max";

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub set: String,
    pub mean: f64,
    pub variance: f64,
    pub max: f64,
}

/// `icosphere:SUBDIV[:RADIUS]` (centered at the origin) or an OBJ path.
pub fn load_mesh(spec: &str) -> Result<TriangleMesh, CliError> {
    if let Some(rest) = spec.strip_prefix("icosphere:") {
        let mut parts = rest.split(':');
        let bad = || CliError::Config(format!("invalid mesh `{spec}`: expected icosphere:SUBDIV[:RADIUS]"));
        let subdivisions: u32 = parts.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let radius: f64 = match parts.next() {
            Some(r) => r.parse().map_err(|_| bad())?,
            None => 1.0,
        };
        if parts.next().is_some() || subdivisions > 8 || !(radius > 0.0 && radius.is_finite()) {
            return Err(bad());
        }
        return Ok(TriangleMesh::icosphere(subdivisions, radius, Vec3::zeros()));
    }
    Ok(read_obj(spec)?)
}

fn summarize(name: &str, field: &CoverageField) -> SummaryRow {
    let values = field.normalized();
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    SummaryRow {
        set: name.to_string(),
        mean,
        variance: coverage_variance(field),
        max: values.iter().copied().fold(0.0, f64::max),
    }
}

fn views_of(path: &Path, cfg: &RunConfig, selection: Option<&Path>) -> Result<Vec<CameraView>, CliError> {
    let mut ds = dataset::load(path, cfg.format)?;
    if cfg.project_sphere == Some(true) {
        ds.set = dataset::project_about_centroid(&ds.set)?;
    }
    match selection {
        None => Ok(ds.set.views().to_vec()),
        Some(m) => read_manifest(m)?
            .view_ids()
            .iter()
            .map(|id| {
                ds.set
                    .get(id)
                    .cloned()
                    .ok_or_else(|| CliError::Data(format!("manifest view `{id}` is not in {}", path.display())))
            })
            .collect(),
    }
}

/// Measures the dataset's cameras (restricted to `selection` when given)
/// and, with `compare`, a second camera set on the same surface samples.
/// Writes `field_{a,b}.bin`, `coverage_{a,b}.ply`, `difference.bin` and
/// `summary.csv`; the difference row is in units of the pooled standard
/// deviation of the two fields.
pub fn run(mut cfg: RunConfig) -> Result<Vec<SummaryRow>, CliError> {
    let mesh_spec = cfg
        .mesh
        .clone()
        .ok_or_else(|| CliError::Config("--mesh is required".into()))?;
    let mesh = load_mesh(&mesh_spec)?;
    let dataset = cfg
        .dataset
        .clone()
        .ok_or_else(|| CliError::Config("--dataset is required".into()))?;
    let seed = *cfg.resolved_seeds()?.first().expect("at least one seed");
    let m = *cfg.surface_samples.get_or_insert(DEFAULT_SURFACE_SAMPLES);
    if m == 0 {
        return Err(CliError::Config("--surface-samples must be positive".into()));
    }
    let samples = match cfg.ball_radius {
        Some(r) => sample_surface(&mesh, m, r, seed)?,
        None => sample_surface_auto(&mesh, m, seed)?,
    };
    let opts = CoverageOptions {
        stride: *cfg.stride.get_or_insert(CoverageOptions::default().stride),
        normalization: *cfg.normalization.get_or_insert_default(),
        ..CoverageOptions::default()
    };
    let out = ensure_out_dir(&cfg)?;

    let mut sets: Vec<(&str, Vec<CameraView>)> = vec![("a", views_of(&dataset, &cfg, cfg.selection.as_deref())?)];
    if let Some(b) = &cfg.compare {
        sets.push(("b", views_of(b, &cfg, None)?));
    }
    let mut fields = Vec::new();
    let mut rows = Vec::new();
    for (name, views) in &sets {
        let field = coverage_measure(&mesh, &samples, views, &opts)?;
        log::info!("set {name}: {} rays, {} hits", field.rays_cast, field.hits);
        write_field(out.join(format!("field_{name}.bin")), &field)?;
        write_coverage_ply(out.join(format!("coverage_{name}.ply")), &mesh, &field)?;
        rows.push(summarize(name, &field));
        fields.push(field);
    }
    if let [a, b] = &fields[..] {
        let diff = coverage_difference(a, b)?;
        let unit = if diff.sigma > 0.0 { diff.sigma } else { 1.0 };
        let mut as_field = CoverageField::zeros(samples.clone());
        as_field.raw = diff.values.clone();
        as_field.kappa = unit;
        write_field(out.join("difference.bin"), &as_field)?;
        rows.push(SummaryRow {
            set: "difference".into(),
            mean: diff.mean,
            variance: diff.std * diff.std,
            max: diff.max,
        });
    }

    let mut csv = String::from(SUMMARY_HEADER);
    csv.push('\n');
    for r in &rows {
        let _ = writeln!(csv, "{},{},{},{}", r.set, num(r.mean), num(r.variance), num(r.max));
    }
    let path: PathBuf = out.join("summary.csv");
    std::fs::write(&path, csv)?;
    log::info!("wrote {}", path.display());
    Ok(rows)
}

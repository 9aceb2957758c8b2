pub mod coverage;
pub mod select;
pub mod simulate;
pub mod split;

use std::path::{Path, PathBuf};

use viewdir_core::io::{write_manifest, SelectionManifest};

use crate::config::RunConfig;
use crate::error::CliError;

/// Runs `f(repetition, seed)` for every seed, up to `jobs` at a time, and
/// returns the results in seed order.
pub(crate) fn run_repetitions<T, F>(jobs: Option<usize>, seeds: &[u64], f: F) -> Result<Vec<T>, CliError>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T, CliError> + Sync + Send,
{
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.unwrap_or(0))
            .build()
            .map_err(|e| CliError::Internal(format!("cannot start worker threads: {e}")))?;
        pool.install(|| seeds.par_iter().enumerate().map(|(i, &s)| f(i, s)).collect())
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = jobs;
        seeds.iter().enumerate().map(|(i, &s)| f(i, s)).collect()
    }
}

pub(crate) fn ensure_out_dir(cfg: &RunConfig) -> Result<PathBuf, CliError> {
    let out = cfg.out_dir();
    std::fs::create_dir_all(&out)
        .map_err(|e| CliError::Data(format!("cannot create output directory {}: {e}", out.display())))?;
    Ok(out)
}

pub(crate) fn echo_value(cfg: &RunConfig) -> Result<serde_json::Value, CliError> {
    serde_json::to_value(cfg.echo()).map_err(|e| CliError::Internal(e.to_string()))
}

/// Writes `manifest`, stamping the creation time when asked to.
pub(crate) fn write_stamped(mut manifest: SelectionManifest, cfg: &RunConfig, path: &Path) -> Result<(), CliError> {
    if cfg.stamp_time == Some(true) {
        manifest.created_at = Some(chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true));
    }
    write_manifest(&manifest, path)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

/// Shortest round-trip form, as used in every CSV.
pub(crate) fn num(x: f64) -> String {
    format!("{x}")
}

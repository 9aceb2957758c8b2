//! Run configuration: an optional TOML or JSON file (schema `v = 1`)
//! overlaid with command-line flags. Flags win.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use viewdir_core::coverage::Normalization;
use viewdir_core::evaluator::EvaluatorBinding;
use viewdir_core::metrics::Spatial;
use viewdir_core::relax::Domain;

use crate::error::CliError;

pub const CONFIG_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Transforms,
    ColmapText,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Rs,
    Fvs,
    IgsGreedy,
    IgsZipf,
    IgsVmf,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Rs => "rs",
            Method::Fvs => "fvs",
            Method::IgsGreedy => "igs-greedy",
            Method::IgsZipf => "igs-zipf",
            Method::IgsVmf => "igs-vmf",
        }
    }

    pub fn is_igs(self) -> bool {
        matches!(self, Method::IgsGreedy | Method::IgsZipf | Method::IgsVmf)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SplitMode {
    UniformSphere,
    FvsResplit,
}

/// Every setting any command reads. Absent fields fall back to defaults
/// when a command resolves its plan; the resolved form is echoed into
/// manifests and can be fed back as a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<u64>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project_sphere: Option<bool>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub method: Option<Method>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<usize>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spatial: Option<Spatial>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize_spatial: Option<bool>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kappa: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relax: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relax_domain: Option<Domain>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lloyd_iters: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluator: Option<EvaluatorBinding>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub repetitions: Option<usize>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mesh: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub selection: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface_samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stride: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub split_mode: Option<SplitMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotate_z: Option<Vec<f64>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub methods: Option<Vec<Method>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool_size: Option<usize>,

    /// Run control; never echoed because it does not change results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stamp_time: Option<bool>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),* $(,)?) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f.clone(); } )*
    };
}

impl RunConfig {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: &RunConfig) -> RunConfig {
        overlay!(self, top; v, dataset, format, project_sphere, method, budget, initial_k, schedule,
            spatial, alpha, normalize_spatial, gamma, kappa, sigma, relax, relax_domain, lloyd_iters,
            support_samples, evaluator, seeds, repetitions, mesh, compare, selection, surface_samples,
            ball_radius, stride, normalization, split_mode, count, radius, center, rotate_z, methods,
            pool_size, jobs, out, stamp_time);
        self
    }

    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
        let cfg: RunConfig = if is_json {
            serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        };
        match cfg.v {
            Some(CONFIG_VERSION) => Ok(cfg),
            Some(v) => Err(CliError::Config(format!(
                "{}: unsupported config version {v} (expected {CONFIG_VERSION})",
                path.display()
            ))),
            None => Err(CliError::Config(format!(
                "{}: missing schema version `v`",
                path.display()
            ))),
        }
    }

    /// Seeds for the repetitions: explicit list, `0..repetitions`, or `[0]`.
    pub fn resolved_seeds(&self) -> Result<Vec<u64>, CliError> {
        let seeds = match (&self.seeds, self.repetitions) {
            (Some(s), Some(r)) if s.len() != r => {
                return Err(CliError::Config(format!("{} seeds given for {r} repetitions", s.len())))
            }
            (Some(s), _) => s.clone(),
            (None, Some(r)) => (0..r as u64).collect(),
            (None, None) => vec![0],
        };
        if seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != seeds.len() {
            return Err(CliError::Config("seeds must be distinct".into()));
        }
        Ok(seeds)
    }

    /// Copy without run-control fields, for echoing.
    pub fn echo(&self) -> RunConfig {
        RunConfig {
            v: Some(CONFIG_VERSION),
            jobs: None,
            out: None,
            stamp_time: None,
            ..self.clone()
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

/// Comma-separated list parser for flags such as `--seeds 0,1,2`.
pub fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, String> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| format!("invalid list entry `{t}`")))
        .collect()
}

pub fn parse_vec3(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = parse_list(s)?;
    v.try_into()
        .map_err(|_| "expected three comma-separated numbers".to_string())
}

use std::fmt::Write as _;
use std::path::PathBuf;

use viewdir_core::evaluator::{oracle_scores, EvaluatorBinding, OracleParams};
use viewdir_core::split::uniform_sphere_poses;
use viewdir_core::{Vec3, ViewSet};

use crate::config::{Format, Method, RunConfig};
use crate::dataset::{self, require_unit_sphere, Dataset};
use crate::error::CliError;

use super::select::Selector;
use super::{echo_value, ensure_out_dir, num, run_repetitions};

pub const DEFAULT_POOL_SIZE: usize = 200;
pub const CSV_HEADER: &str = "method,repetition,n_views,mean_candidate_score";

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub method: String,
    pub repetition: usize,
    pub n_views: usize,
    pub mean_candidate_score: f64,
}

/// Mean oracle score over the unselected views when the first `n` picks
/// of `order` are selected, for each `n` in `checkpoints`.
pub fn trajectory(
    pool: &ViewSet,
    order: &[usize],
    checkpoints: &[usize],
    params: &OracleParams,
) -> Result<Vec<f64>, CliError> {
    checkpoints
        .iter()
        .map(|&n| {
            let set = pool.cleared().with_selected(&order[..n])?;
            let report = oracle_scores(&set, params)?;
            let ids = set.candidate_ids();
            let scores = report.scores_for(&ids);
            Ok(scores.iter().sum::<f64>() / scores.len() as f64)
        })
        .collect()
}

fn label(method: Method, relax: bool) -> String {
    if relax && method.is_igs() {
        format!("{}+relax", method.name())
    } else {
        method.name().to_string()
    }
}

/// Runs every method for every repetition against the synthetic oracle and
/// writes `simulate.csv` plus the resolved configuration
/// (`simulate_config.json`). Returns the CSV rows.
pub fn run(mut cfg: RunConfig) -> Result<Vec<Row>, CliError> {
    let ds = match &cfg.dataset {
        Some(_) => dataset::load_from_config(&cfg)?,
        None => {
            let n = *cfg.pool_size.get_or_insert(DEFAULT_POOL_SIZE);
            if n < 2 {
                return Err(CliError::Config("--pool-size must be at least 2".into()));
            }
            let views = uniform_sphere_poses(n, 1.0, &Vec3::zeros(), None, "v")?;
            Dataset {
                path: PathBuf::from("fibonacci"),
                format: Format::Transforms,
                set: ViewSet::new(views)?,
                covisibility: None,
            }
        }
    };
    require_unit_sphere(&ds.set, "the synthetic oracle")?;

    let params = match cfg.evaluator.take() {
        None => OracleParams::default(),
        Some(EvaluatorBinding::SyntheticOracle(p)) => p,
        Some(EvaluatorBinding::ExternalProcess { .. }) => {
            return Err(CliError::Config(
                "simulate scores with the synthetic oracle; external evaluators are not supported".into(),
            ))
        }
    };
    params.validate()?;
    cfg.evaluator = Some(EvaluatorBinding::SyntheticOracle(params.clone()));

    let methods = cfg.methods.get_or_insert_with(|| vec![Method::Rs, Method::Fvs]).clone();
    if methods.is_empty() {
        return Err(CliError::Config("--methods must name at least one method".into()));
    }
    let seeds = cfg.resolved_seeds()?;
    cfg.seeds = Some(seeds.clone());
    cfg.repetitions = None;

    // Resolve every method against one config so the echo covers all of them.
    let selectors: Vec<Selector> = methods
        .iter()
        .map(|&m| Selector::resolve(m, &mut cfg, &ds))
        .collect::<Result<_, _>>()?;
    cfg.method = None;
    cfg.schedule = Some(selectors[0].plan.schedule.clone());
    let checkpoints = selectors[0].plan.checkpoints();
    let relax = cfg.relax == Some(true);

    let per_rep = run_repetitions(cfg.jobs, &seeds, |rep, seed| {
        let oracle = OracleParams {
            seed: params.seed.wrapping_add(seed),
            ..params.clone()
        };
        let mut rows = Vec::new();
        for sel in &selectors {
            let picks = sel.run(&ds.set, seed, None)?;
            let means = trajectory(&ds.set, &picks.order, &checkpoints, &oracle)?;
            for (&n, mean) in checkpoints.iter().zip(means) {
                rows.push(Row {
                    method: label(sel.method, relax),
                    repetition: rep,
                    n_views: n,
                    mean_candidate_score: mean,
                });
            }
        }
        Ok(rows)
    })?;

    // Method-major order, independent of how repetitions were scheduled.
    let mut rows: Vec<Row> = Vec::new();
    for m in 0..selectors.len() {
        for rep_rows in &per_rep {
            let chunk = rep_rows.len() / selectors.len();
            rows.extend_from_slice(&rep_rows[m * chunk..(m + 1) * chunk]);
        }
    }

    let out = ensure_out_dir(&cfg)?;
    let mut csv = String::from(CSV_HEADER);
    csv.push('\n');
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{}",
            r.method,
            r.repetition,
            r.n_views,
            num(r.mean_candidate_score)
        );
    }
    std::fs::write(out.join("simulate.csv"), csv)?;
    let echo = serde_json::to_string_pretty(&echo_value(&cfg)?).map_err(|e| CliError::Internal(e.to_string()))?;
    std::fs::write(out.join("simulate_config.json"), echo + "\n")?;
    log::info!("wrote {} rows to {}", rows.len(), out.join("simulate.csv").display());
    Ok(rows)
}

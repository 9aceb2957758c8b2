use std::path::PathBuf;

use viewdir_core::evaluator::EvaluatorBinding;
use viewdir_core::fvs::{fvs_trace, FvsConfig};
use viewdir_core::igs::{igs_run, IgsConfig, IgsOutcome, Sampler};
use viewdir_core::io::{write_run_log, SelectionManifest};
use viewdir_core::metrics::DistanceSpec;
use viewdir_core::random::random_select;
use viewdir_core::relax::{Domain, LloydConfig};
use viewdir_core::ViewSet;

use crate::config::{Method, RunConfig};
use crate::dataset::{self, require_unit_sphere, Dataset, SPHERE_TOLERANCE};
use crate::error::CliError;
use crate::plan::{resolve_plan, Plan};

use super::{echo_value, ensure_out_dir, run_repetitions, write_stamped};

pub const DEFAULT_GAMMA: f64 = 10.0;

/// Everything one repetition needs, resolved once.
#[derive(Debug, Clone)]
pub struct Selector {
    pub method: Method,
    pub plan: Plan,
    pub spec: Option<DistanceSpec>,
    pub sampler: Option<Sampler>,
    pub relaxation: Option<LloydConfig>,
    pub evaluator: Option<EvaluatorBinding>,
}

/// Ordered selection of one repetition, with a score per pick where the
/// method produces one.
#[derive(Debug, Clone)]
pub struct Picks {
    pub order: Vec<usize>,
    pub scores: Vec<Option<f64>>,
    pub igs: Option<IgsOutcome>,
}

impl Selector {
    /// Validates method-specific parameters and fills their resolved values
    /// into `cfg`.
    pub fn resolve(method: Method, cfg: &mut RunConfig, ds: &Dataset) -> Result<Selector, CliError> {
        let plan = resolve_plan(cfg)?;
        if plan.budget() > ds.set.len() {
            return Err(CliError::Config(format!(
                "budget {} exceeds the pool of {} views",
                plan.budget(),
                ds.set.len()
            )));
        }
        cfg.method = Some(method);
        cfg.budget = Some(plan.budget());
        cfg.initial_k = Some(plan.initial_k);
        let mut sel = Selector {
            method,
            plan,
            spec: None,
            sampler: None,
            relaxation: None,
            evaluator: None,
        };
        match method {
            Method::Rs => {}
            Method::Fvs => sel.spec = Some(dataset::resolve_distance(cfg, ds)?),
            Method::IgsGreedy | Method::IgsZipf | Method::IgsVmf => {
                cfg.schedule = Some(sel.plan.schedule.clone());
                sel.sampler = Some(match method {
                    Method::IgsGreedy => Sampler::Greedy,
                    Method::IgsZipf => {
                        let gamma = *cfg.gamma.get_or_insert(DEFAULT_GAMMA);
                        Sampler::Zipf { gamma }
                    }
                    _ => {
                        require_unit_sphere(&ds.set, "igs-vmf")?;
                        match (cfg.kappa, cfg.sigma) {
                            (Some(kappa), Some(sigma)) => Sampler::Mvmf { kappa, sigma },
                            _ => return Err(CliError::Config("igs-vmf needs both --kappa and --sigma".into())),
                        }
                    }
                });
                let relax = *cfg.relax.get_or_insert(false);
                if relax {
                    let on_sphere = ds.set.on_unit_sphere(SPHERE_TOLERANCE);
                    let domain =
                        *cfg.relax_domain
                            .get_or_insert(if on_sphere { Domain::Sphere } else { Domain::ConvexHull });
                    if domain == Domain::Sphere {
                        require_unit_sphere(&ds.set, "spherical Lloyd relaxation")?;
                    }
                    let defaults = LloydConfig::default();
                    let lloyd = LloydConfig {
                        domain,
                        n_iter: *cfg.lloyd_iters.get_or_insert(defaults.n_iter),
                        support_samples: *cfg.support_samples.get_or_insert(defaults.support_samples),
                        ..defaults
                    };
                    lloyd.validate()?;
                    sel.relaxation = Some(lloyd);
                }
                let binding = cfg.evaluator.clone().ok_or_else(|| {
                    CliError::Config(
                        "igs methods need an evaluator: pass --evaluator-cmd or --oracle, or set `evaluator` in the config file"
                            .into(),
                    )
                })?;
                binding.validate()?;
                if matches!(binding, EvaluatorBinding::SyntheticOracle(_)) {
                    require_unit_sphere(&ds.set, "the synthetic oracle")?;
                }
                sel.evaluator = Some(binding);
            }
        }
        Ok(sel)
    }

    /// Runs one repetition. The relaxation and any synthetic oracle are
    /// seeded from `seed` so repetitions differ throughout.
    pub fn run(&self, set: &ViewSet, seed: u64, dataset_path: Option<String>) -> Result<Picks, CliError> {
        let budget = self.plan.budget();
        match self.method {
            Method::Rs => {
                let order = random_select(set, budget, seed)?.selected().to_vec();
                Ok(Picks {
                    scores: vec![None; order.len()],
                    order,
                    igs: None,
                })
            }
            Method::Fvs => {
                let spec = self.spec.clone().expect("resolved");
                let fvs = FvsConfig::new(budget, spec)
                    .with_initial_k(self.plan.initial_k)
                    .with_seed(seed);
                let (picked, steps) = fvs_trace(set, &fvs)?;
                Ok(Picks {
                    order: picked.selected().to_vec(),
                    scores: steps.iter().map(|s| s.min_distance).collect(),
                    igs: None,
                })
            }
            _ => {
                let mut binding = self.evaluator.clone().expect("resolved");
                if let EvaluatorBinding::SyntheticOracle(p) = &mut binding {
                    p.seed = p.seed.wrapping_add(seed);
                }
                let mut evaluator = binding.build(dataset_path)?;
                let igs = IgsConfig {
                    initial_k: self.plan.initial_k,
                    schedule: self.plan.schedule.clone(),
                    sampler: self.sampler.expect("resolved"),
                    relaxation: self.relaxation.clone().map(|r| LloydConfig { seed, ..r }),
                    seed,
                };
                let outcome = igs_run(set, &igs, &mut evaluator)?;
                let order = outcome.set.selected().to_vec();
                let mut scores = vec![None; self.plan.initial_k];
                let mut round_end = self.plan.initial_k;
                for (round, &l) in self.plan.schedule.iter().enumerate() {
                    for &v in &order[round_end..round_end + l] {
                        let id = set.view(v).id();
                        scores.push(
                            outcome
                                .log
                                .iter()
                                .find(|r| r.round == round && r.view_id == id)
                                .map(|r| r.score),
                        );
                    }
                    round_end += l;
                }
                Ok(Picks {
                    order,
                    scores,
                    igs: Some(outcome),
                })
            }
        }
    }
}

/// Writes `select_{method}_seed{seed}.json` per repetition (plus
/// `runlog_{method}_seed{seed}.jsonl` for the information-gain methods)
/// and returns the manifest paths.
pub fn run(mut cfg: RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let method = cfg
        .method
        .ok_or_else(|| CliError::Config("--method is required".into()))?;
    let ds = dataset::load_from_config(&cfg)?;
    let seeds = cfg.resolved_seeds()?;
    cfg.seeds = Some(seeds.clone());
    cfg.repetitions = None;
    let selector = Selector::resolve(method, &mut cfg, &ds)?;
    if !method.is_igs() && cfg.relax == Some(true) {
        log::warn!(
            "--relax only applies to the information-gain methods; ignored for {}",
            method.name()
        );
    }
    let out = ensure_out_dir(&cfg)?;
    let echo = echo_value(&cfg)?;
    let dataset_path = Some(ds.path.display().to_string());

    run_repetitions(cfg.jobs, &seeds, |_, seed| {
        let picks = selector.run(&ds.set, seed, dataset_path.clone())?;
        let ids: Vec<&str> = picks.order.iter().map(|&i| ds.set.view(i).id()).collect();
        let mut manifest = SelectionManifest::new(method.name(), seed, echo.clone(), &ids);
        for (entry, score) in manifest.order.iter_mut().zip(&picks.scores) {
            entry.score = *score;
        }
        let path = out.join(format!("select_{}_seed{seed}.json", method.name()));
        write_stamped(manifest, &cfg, &path)?;
        if let Some(igs) = &picks.igs {
            let log_path = out.join(format!("runlog_{}_seed{seed}.jsonl", method.name()));
            write_run_log(&log_path, &igs.log)?;
        }
        Ok(path)
    })
}

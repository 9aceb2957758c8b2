//! Budget and schedule resolution.

use viewdir_core::igs::IgsConfig;

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub initial_k: usize,
    pub schedule: Vec<usize>,
}

impl Plan {
    pub fn budget(&self) -> usize {
        self.initial_k + self.schedule.iter().sum::<usize>()
    }

    /// Selection sizes after the initial draw and after each round.
    pub fn checkpoints(&self) -> Vec<usize> {
        let mut n = self.initial_k;
        let mut out = vec![n];
        for l in &self.schedule {
            n += l;
            out.push(n);
        }
        out
    }
}

/// An explicit schedule is used as given and must agree with any budget.
/// Otherwise the default schedule (5 initial views, +5 to 30, +10 to 150)
/// is cut at the budget, the last round shortened if needed.
pub fn resolve_plan(cfg: &RunConfig) -> Result<Plan, CliError> {
    let (default_k, default_schedule) = IgsConfig::default_schedule();
    if cfg.initial_k == Some(0) {
        return Err(CliError::Config("initial_k must be positive".into()));
    }
    if cfg.budget == Some(0) {
        return Err(CliError::Config("budget must be positive".into()));
    }
    let plan = match (&cfg.schedule, cfg.budget) {
        (Some(schedule), budget) => {
            if schedule.contains(&0) {
                return Err(CliError::Config("schedule entries must be positive".into()));
            }
            let plan = Plan {
                initial_k: cfg.initial_k.unwrap_or(default_k),
                schedule: schedule.clone(),
            };
            if let Some(b) = budget {
                if b != plan.budget() {
                    return Err(CliError::Config(format!(
                        "budget {b} disagrees with initial_k + schedule = {}",
                        plan.budget()
                    )));
                }
            }
            plan
        }
        (None, Some(budget)) => {
            let initial_k = cfg.initial_k.unwrap_or(default_k.min(budget));
            if initial_k > budget {
                return Err(CliError::Config(format!(
                    "initial_k {initial_k} exceeds budget {budget}"
                )));
            }
            let mut left = budget - initial_k;
            let mut schedule = Vec::new();
            for l in default_schedule {
                if left == 0 {
                    break;
                }
                schedule.push(l.min(left));
                left -= l.min(left);
            }
            if left > 0 {
                schedule.push(left);
            }
            Plan { initial_k, schedule }
        }
        (None, None) => Plan {
            initial_k: cfg.initial_k.unwrap_or(default_k),
            schedule: default_schedule,
        },
    };
    Ok(plan)
}

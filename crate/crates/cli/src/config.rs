//! Experiment configuration files (JSON).
//!
//! Relative dataset paths resolve against the directory holding the config
//! file; the output directory resolves against the working directory.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use localsgd_core::experiment::{Metric, RunConfig, ScheduleFamily};
use localsgd_core::objectives::{
    read_libsvm, LogisticL2, Objective, PiecewiseQuadratic1D, QuadraticStrongGrowth,
};
use localsgd_core::{beta_min, CommSchedule, Point, StepSchedule};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub objective: ObjectiveSpec,
    /// Worker count for `run`.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Worker counts for `speedup`.
    #[serde(default)]
    pub workers_list: Vec<usize>,
    pub horizon: usize,
    #[serde(default)]
    pub x0: Option<Vec<f64>>,
    pub steps: StepSpec,
    /// Named schedules for `run`.
    #[serde(default)]
    pub strategies: Vec<StrategySpec>,
    /// Schedule families for `speedup`.
    #[serde(default)]
    pub families: Vec<ScheduleFamily>,
    pub replications: u64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub trace_stride: Option<usize>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectiveSpec {
    Quadratic {
        dim: usize,
        c1: f64,
        c2: f64,
    },
    Piecewise {
        sigma: f64,
    },
    Logistic {
        data: PathBuf,
        lambda: f64,
        #[serde(default = "one")]
        batch: usize,
        #[serde(default)]
        dim: Option<usize>,
    },
}

fn one() -> usize {
    1
}

/// Step sizes; `mu` and `smoothness` default to the objective's constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepSpec {
    InverseT {
        #[serde(default)]
        mu: Option<f64>,
        beta: BetaSpec,
    },
    Theta {
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        smoothness: Option<f64>,
    },
    Constant {
        eta: f64,
    },
    CappedInverseT {
        #[serde(default)]
        mu: Option<f64>,
        #[serde(default)]
        smoothness: Option<f64>,
    },
}

/// A literal `β`, or `"theorem"` for the smallest value the growing-interval
/// bound admits for each strategy's `(N, T, R)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BetaSpec {
    Value(f64),
    Mode(BetaMode),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaMode {
    Theorem,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySpec {
    pub name: String,
    pub schedule: ScheduleSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScheduleSpec {
    Synchronized,
    OneShot,
    /// Growing intervals; `a` defaults to `⌈2T/R²⌉`.
    Growing {
        rounds: usize,
        #[serde(default)]
        a: Option<usize>,
    },
    Fixed {
        interval: usize,
    },
    /// Constant intervals `H = ⌈T/R⌉`.
    FixedRounds {
        rounds: usize,
    },
    /// Constant intervals `H = round(√(TN))`.
    SqrtTn,
    /// Constant intervals `H = round((TN)^{1/3})`.
    CbrtTn,
    Explicit {
        taus: Vec<usize>,
    },
}

impl ScheduleSpec {
    pub fn build(&self, horizon: usize, workers: usize) -> localsgd_core::Result<CommSchedule> {
        let tn = (horizon * workers) as f64;
        let fixed = |h: f64| CommSchedule::fixed(horizon, (h.round() as usize).clamp(1, horizon));
        match self {
            Self::Synchronized => CommSchedule::synchronized(horizon),
            Self::OneShot => CommSchedule::one_shot(horizon),
            Self::Growing { rounds, a: None } => CommSchedule::growing(horizon, *rounds),
            Self::Growing { rounds, a: Some(a) } => {
                CommSchedule::growing_with_step(horizon, *rounds, *a)
            }
            Self::Fixed { interval } => CommSchedule::fixed(horizon, *interval),
            Self::FixedRounds { rounds } => {
                CommSchedule::fixed(horizon, horizon.div_ceil((*rounds).max(1)))
            }
            Self::SqrtTn => fixed(tn.sqrt()),
            Self::CbrtTn => fixed(tn.cbrt()),
            Self::Explicit { taus } => {
                let s = CommSchedule::from_taus(taus.clone())?;
                if s.horizon() != horizon {
                    return Err(localsgd_core::Error::InvalidArgument(format!(
                        "explicit schedule ends at {} but T={horizon}",
                        s.horizon()
                    )));
                }
                Ok(s)
            }
        }
    }
}

/// A parsed config with its objective constructed.
pub struct Experiment {
    pub config: ExperimentConfig,
    pub objective: Arc<dyn Objective>,
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((Self::from_json(&text)?, base))
    }
}

impl Experiment {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let (config, base) = ExperimentConfig::load(path)?;
        Self::new(config, &base)
    }

    /// Validates the config and builds its objective. `base_dir` anchors
    /// relative dataset paths.
    pub fn new(config: ExperimentConfig, base_dir: &Path) -> Result<Self, CliError> {
        if config.horizon < 1 {
            return Err(config_err("horizon must be >= 1"));
        }
        if config.replications < 1 {
            return Err(config_err("replications must be >= 1"));
        }
        if config.trace_stride == Some(0) {
            return Err(config_err("trace_stride must be >= 1"));
        }
        let objective: Arc<dyn Objective> = match &config.objective {
            ObjectiveSpec::Quadratic { dim, c1, c2 } => {
                Arc::new(QuadraticStrongGrowth::new(*dim, *c1, *c2).map_err(config_err)?)
            }
            ObjectiveSpec::Piecewise { sigma } => {
                Arc::new(PiecewiseQuadratic1D::new(*sigma).map_err(config_err)?)
            }
            ObjectiveSpec::Logistic {
                data,
                lambda,
                batch,
                dim,
            } => {
                let path = base_dir.join(data);
                if !path.is_file() {
                    return Err(config_err(format!(
                        "dataset not found: {}",
                        path.display()
                    )));
                }
                let ds = read_libsvm(&path, *dim)
                    .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
                Arc::new(
                    LogisticL2::new(Arc::new(ds), *lambda, *batch)
                        .map_err(|e| CliError::Runtime(e.to_string()))?,
                )
            }
        };
        if let Some(x0) = &config.x0 {
            if x0.len() != objective.dim() {
                return Err(config_err(format!(
                    "x0 has {} coordinates, objective has {}",
                    x0.len(),
                    objective.dim()
                )));
            }
            Point::new(x0.clone()).map_err(config_err)?;
        }
        Ok(Self { config, objective })
    }

    /// `x0` from the config, else zeros for logistic and ones otherwise.
    pub fn x0(&self) -> Point {
        match (&self.config.x0, &self.config.objective) {
            (Some(x), _) => Point::new(x.clone()).expect("validated at load"),
            (None, ObjectiveSpec::Logistic { .. }) => Point::zeros(self.objective.dim()),
            (None, _) => Point::filled(self.objective.dim(), 1.0),
        }
    }

    /// Step schedule for a run with `workers` and `schedule`.
    pub fn steps(&self, workers: usize, schedule: &CommSchedule) -> Result<StepSchedule, CliError> {
        let k = self.objective.constants();
        let steps = match self.config.steps {
            StepSpec::InverseT { mu, beta } => {
                let beta = match beta {
                    BetaSpec::Value(b) => b,
                    BetaSpec::Mode(BetaMode::Theorem) => beta_min(
                        k.kappa(),
                        k.c,
                        workers,
                        self.config.horizon,
                        schedule.rounds(),
                    )
                    .map_err(config_err)?,
                };
                StepSchedule::InverseT {
                    mu: mu.unwrap_or(k.mu),
                    beta,
                }
            }
            StepSpec::Theta { mu, smoothness } => StepSchedule::Theta {
                mu: mu.unwrap_or(k.mu),
                smoothness: smoothness.unwrap_or(k.smoothness),
            },
            StepSpec::Constant { eta } => StepSchedule::Constant { eta },
            StepSpec::CappedInverseT { mu, smoothness } => StepSchedule::CappedInverseT {
                mu: mu.unwrap_or(k.mu),
                smoothness: smoothness.unwrap_or(k.smoothness),
            },
        };
        steps.validate().map_err(config_err)?;
        Ok(steps)
    }

    fn run_config(&self, workers: usize, schedule: CommSchedule) -> Result<RunConfig, CliError> {
        let steps = self.steps(workers, &schedule)?;
        Ok(RunConfig {
            objective: self.objective.clone(),
            workers,
            horizon: self.config.horizon,
            schedule,
            steps,
            x0: self.x0(),
            replications: self.config.replications,
            seed: self.config.seed,
            trace_stride: self.config.trace_stride,
        })
    }

    /// One run configuration per named strategy.
    pub fn strategy_runs(&self) -> Result<Vec<(String, RunConfig)>, CliError> {
        let workers = self
            .config
            .workers
            .ok_or_else(|| config_err("`workers` is required for run"))?;
        if workers < 1 {
            return Err(config_err("workers must be >= 1"));
        }
        if self.config.strategies.is_empty() {
            return Err(config_err("`strategies` must list at least one schedule"));
        }
        let mut seen = std::collections::HashSet::new();
        self.config
            .strategies
            .iter()
            .map(|s| {
                if s.name.is_empty()
                    || !s
                        .name
                        .chars()
                        .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
                {
                    return Err(config_err(format!(
                        "strategy name {:?} must be non-empty [A-Za-z0-9_-]",
                        s.name
                    )));
                }
                if !seen.insert(s.name.clone()) {
                    return Err(config_err(format!("duplicate strategy {:?}", s.name)));
                }
                let schedule = s
                    .schedule
                    .build(self.config.horizon, workers)
                    .map_err(|e| config_err(format!("strategy {:?}: {e}", s.name)))?;
                Ok((s.name.clone(), self.run_config(workers, schedule)?))
            })
            .collect()
    }

    /// Base configuration for speed-up curves (single worker, one-shot).
    pub fn speedup_base(&self) -> Result<RunConfig, CliError> {
        if matches!(
            self.config.steps,
            StepSpec::InverseT {
                beta: BetaSpec::Mode(_),
                ..
            }
        ) {
            return Err(config_err(
                "speed-up curves need one step sequence for every N; use a numeric beta",
            ));
        }
        if self.config.workers_list.is_empty() || self.config.workers_list.contains(&0) {
            return Err(config_err("`workers_list` must be non-empty with entries >= 1"));
        }
        if self.config.families.is_empty() {
            return Err(config_err("`families` must list at least one schedule family"));
        }
        let one_shot = CommSchedule::one_shot(self.config.horizon).map_err(config_err)?;
        self.run_config(1, one_shot)
    }
}

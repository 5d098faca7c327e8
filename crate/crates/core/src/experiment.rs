//! Replicated experiments: expected-error estimates and speed-up curves.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::model::Point;
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::schedules::{max_growing_rounds, CommSchedule, StepSchedule};
use crate::simulator::{default_trace_stride, LocalSgd, RunResult};

/// Below this mean error a speed-up ratio is reported as saturated.
pub const SATURATION_FLOOR: f64 = 1e-30;

/// Everything needed to replicate one Local SGD configuration.
#[derive(Clone)]
pub struct RunConfig {
    pub objective: Arc<dyn Objective>,
    pub workers: usize,
    pub horizon: usize,
    pub schedule: CommSchedule,
    pub steps: StepSchedule,
    pub x0: Point,
    pub replications: u64,
    pub seed: u64,
    pub trace_stride: Option<usize>,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.workers < 1 {
            return Err(invalid("N must be >= 1"));
        }
        if self.horizon < 1 {
            return Err(invalid("T must be >= 1"));
        }
        if self.replications < 1 {
            return Err(invalid("replications must be >= 1"));
        }
        if self.schedule.horizon() != self.horizon {
            return Err(invalid(format!(
                "schedule horizon {} does not match T={}",
                self.schedule.horizon(),
                self.horizon
            )));
        }
        if self.x0.dim() != self.objective.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.objective.dim(),
                actual: self.x0.dim(),
            });
        }
        self.steps.validate()
    }

    /// Stream base for replication `r`.
    pub fn stream(&self, replication: u64) -> RngStream {
        RngStream::new(self.seed).with_replication(replication)
    }

    /// Runs replication `r` alone.
    pub fn run_replication(&self, replication: u64) -> Result<RunResult> {
        let stride = self
            .trace_stride
            .unwrap_or_else(|| default_trace_stride(self.horizon));
        LocalSgd::new(
            self.objective.as_ref(),
            &self.schedule,
            &self.steps,
            self.workers,
        )?
        .with_trace_stride(stride)
        .run(&self.x0, self.stream(replication))
    }
}

impl fmt::Debug for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RunConfig")
            .field("objective", &self.objective.name())
            .field("workers", &self.workers)
            .field("horizon", &self.horizon)
            .field("rounds", &self.schedule.rounds())
            .field("steps", &self.steps)
            .field("replications", &self.replications)
            .field("seed", &self.seed)
            .finish()
    }
}

/// Which final error a summary or speed-up uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// `f(x̄^T) − f*`
    #[default]
    FGap,
    /// `‖x̄^T − x*‖²`
    SqDist,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator; 0 for a single sample).
    pub std: f64,
}

impl Summary {
    pub fn of(samples: &[f64]) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let std = if samples.len() < 2 {
            0.0
        } else {
            (samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Self { mean, std }
    }

    pub fn std_error(&self, n: u64) -> f64 {
        self.std / (n as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: usize,
    pub mean: f64,
    pub std: f64,
}

/// Aggregate over replications of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub objective: String,
    pub workers: usize,
    pub horizon: usize,
    pub rounds: usize,
    pub steps: StepSchedule,
    pub seed: u64,
    pub replications: u64,
    pub final_error_f: Summary,
    pub final_error_sq: Summary,
    pub trace: Vec<TracePoint>,
    /// Per-replication `f(x̄^T) − f*`, in replication order.
    pub final_f_samples: Vec<f64>,
    /// Per-replication `‖x̄^T − x*‖²`, in replication order.
    pub final_sq_samples: Vec<f64>,
    pub wall_ms: u128,
}

impl ExperimentRecord {
    pub fn summary(&self, metric: Metric) -> Summary {
        match metric {
            Metric::FGap => self.final_error_f,
            Metric::SqDist => self.final_error_sq,
        }
    }

    pub fn samples(&self, metric: Metric) -> &[f64] {
        match metric {
            Metric::FGap => &self.final_f_samples,
            Metric::SqDist => &self.final_sq_samples,
        }
    }
}

/// Runs all replications (in parallel) and aggregates them.
///
/// Replication `r` always uses stream `(seed, r, ·, ·)` and aggregation
/// sums in replication order, so the record does not depend on how many
/// threads ran. The first failing replication (by index) fails the call.
pub fn estimate_expected_error(config: &RunConfig) -> Result<ExperimentRecord> {
    config.validate()?;
    let start = Instant::now();
    let runs: Vec<Result<RunResult>> = (0..config.replications)
        .into_par_iter()
        .map(|r| config.run_replication(r))
        .collect();
    let runs = runs
        .into_iter()
        .enumerate()
        .map(|(r, res)| {
            res.map_err(|e| Error::Replication {
                replication: r as u64,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let final_f: Vec<f64> = runs.iter().map(|r| r.final_error_f).collect();
    let final_sq: Vec<f64> = runs.iter().map(|r| r.final_error_sq).collect();
    let trace = runs[0]
        .trace_t
        .iter()
        .enumerate()
        .map(|(k, &t)| {
            let column: Vec<f64> = runs.iter().map(|r| r.error_trace[k]).collect();
            let s = Summary::of(&column);
            TracePoint {
                t,
                mean: s.mean,
                std: s.std,
            }
        })
        .collect();

    Ok(ExperimentRecord {
        objective: config.objective.name().to_string(),
        workers: config.workers,
        horizon: config.horizon,
        rounds: config.schedule.rounds(),
        steps: config.steps,
        seed: config.seed,
        replications: config.replications,
        final_error_f: Summary::of(&final_f),
        final_error_sq: Summary::of(&final_sq),
        trace,
        final_f_samples: final_f,
        final_sq_samples: final_sq,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Rule that picks a communication schedule for `N` workers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScheduleFamily {
    /// Average after every step.
    Synchronized,
    /// `R = N` rounds with linearly growing intervals.
    Growing,
    /// `R = N` rounds of constant length `H = ⌈T/N⌉`.
    Fixed,
    /// `R = round(N^p)` rounds with growing intervals.
    GrowingPower(f64),
    /// A single average at `T`.
    OneShot,
}

impl ScheduleFamily {
    /// Schedule for `workers` over `horizon`. Round counts for the growing
    /// families are clamped to `[1, ⌊√(2T)⌋]`.
    pub fn schedule(&self, workers: usize, horizon: usize) -> Result<CommSchedule> {
        let clamp = |r: usize| r.clamp(1, max_growing_rounds(horizon));
        match *self {
            Self::Synchronized => CommSchedule::synchronized(horizon),
            Self::Growing => CommSchedule::growing(horizon, clamp(workers)),
            Self::Fixed => CommSchedule::fixed(horizon, horizon.div_ceil(workers.max(1)).max(1)),
            Self::GrowingPower(p) => {
                let r = (workers as f64).powf(p).round() as usize;
                CommSchedule::growing(horizon, clamp(r))
            }
            Self::OneShot => CommSchedule::one_shot(horizon),
        }
    }
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Synchronized => f.write_str("synchronized"),
            Self::Growing => f.write_str("growing"),
            Self::Fixed => f.write_str("fixed"),
            Self::GrowingPower(p) => write!(f, "power:{p}"),
            Self::OneShot => f.write_str("one_shot"),
        }
    }
}

impl FromStr for ScheduleFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "synchronized" => Ok(Self::Synchronized),
            "growing" => Ok(Self::Growing),
            "fixed" => Ok(Self::Fixed),
            "one_shot" => Ok(Self::OneShot),
            _ => {
                let p = s
                    .strip_prefix("power:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .filter(|p| *p > 0.0 && p.is_finite())
                    .ok_or_else(|| invalid(format!("unknown schedule family {s:?}")))?;
                Ok(Self::GrowingPower(p))
            }
        }
    }
}

impl Serialize for ScheduleFamily {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ScheduleFamily {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// One entry of a speed-up curve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedupPoint {
    pub workers: usize,
    pub rounds: usize,
    pub mean_error: f64,
    /// `None` when the method's mean error is below [`SATURATION_FLOOR`].
    pub speedup: Option<f64>,
    /// Delta-method standard error of the ratio of means, using the
    /// pairing of replications that share a seed.
    pub speedup_std: Option<f64>,
}

/// Single-worker reference errors shared by every point of a curve.
#[derive(Debug, Clone)]
pub struct SpeedupBaseline {
    samples: Vec<f64>,
    metric: Metric,
}

impl SpeedupBaseline {
    /// Runs single-worker SGD with the base configuration's steps, horizon,
    /// start point, seed and replication count.
    pub fn compute(base: &RunConfig, metric: Metric) -> Result<Self> {
        let single = RunConfig {
            workers: 1,
            schedule: CommSchedule::one_shot(base.horizon)?,
            ..base.clone()
        };
        let rec = estimate_expected_error(&single)?;
        Ok(Self {
            samples: rec.samples(metric).to_vec(),
            metric,
        })
    }

    pub fn mean(&self) -> f64 {
        Summary::of(&self.samples).mean
    }

    /// Speed-up of a method whose per-replication errors are `method`.
    pub fn ratio(&self, method: &[f64]) -> (Option<f64>, Option<f64>) {
        let n = self.samples.len().min(method.len());
        let base = &self.samples[..n];
        let method = &method[..n];
        let mb = Summary::of(base).mean;
        let mm = Summary::of(method).mean;
        if mm < SATURATION_FLOOR {
            return (None, None);
        }
        let speedup = mb / mm;
        if n < 2 {
            return (Some(speedup), Some(0.0));
        }
        let nf = n as f64;
        let (mut vb, mut vm, mut cov) = (0.0, 0.0, 0.0);
        for (b, m) in base.iter().zip(method) {
            vb += (b - mb) * (b - mb);
            vm += (m - mm) * (m - mm);
            cov += (b - mb) * (m - mm);
        }
        let (vb, vm, cov) = (vb / (nf - 1.0), vm / (nf - 1.0), cov / (nf - 1.0));
        let rel_var = (vb / (mb * mb) + vm / (mm * mm) - 2.0 * cov / (mb * mm)) / nf;
        (Some(speedup), Some(speedup * rel_var.max(0.0).sqrt()))
    }
}

/// Speed-up `E_err(1 worker) / E_err(N workers)` for each `N` in `ns`.
pub fn speedup_curve(
    base: &RunConfig,
    ns: &[usize],
    family: ScheduleFamily,
    metric: Metric,
) -> Result<Vec<SpeedupPoint>> {
    let baseline = SpeedupBaseline::compute(base, metric)?;
    speedup_curve_with_baseline(base, ns, family, &baseline)
}

/// As [`speedup_curve`], reusing an already computed baseline.
pub fn speedup_curve_with_baseline(
    base: &RunConfig,
    ns: &[usize],
    family: ScheduleFamily,
    baseline: &SpeedupBaseline,
) -> Result<Vec<SpeedupPoint>> {
    if ns.is_empty() {
        return Err(invalid("worker list must not be empty"));
    }
    ns.iter()
        .map(|&n| speedup_point(base, n, family, baseline))
        .collect()
}

pub fn speedup_point(
    base: &RunConfig,
    workers: usize,
    family: ScheduleFamily,
    baseline: &SpeedupBaseline,
) -> Result<SpeedupPoint> {
    let config = RunConfig {
        workers,
        schedule: family.schedule(workers, base.horizon)?,
        ..base.clone()
    };
    let rec = estimate_expected_error(&config)?;
    let samples = rec.samples(baseline.metric);
    let (speedup, speedup_std) = baseline.ratio(samples);
    Ok(SpeedupPoint {
        workers,
        rounds: config.schedule.rounds(),
        mean_error: rec.summary(baseline.metric).mean,
        speedup,
        speedup_std,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{PiecewiseQuadratic1D, QuadraticStrongGrowth};

    fn quad_config(c1: f64, c2: f64, workers: usize, reps: u64) -> RunConfig {
        RunConfig {
            objective: Arc::new(QuadraticStrongGrowth::new(3, c1, c2).unwrap()),
            workers,
            horizon: 200,
            schedule: CommSchedule::growing(200, 10).unwrap(),
            steps: StepSchedule::InverseT { mu: 1.0, beta: 1.0 },
            x0: Point::filled(3, 1.0),
            replications: reps,
            seed: 5,
            trace_stride: None,
        }
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[2.0]);
        assert_eq!((s.mean, s.std), (2.0, 0.0));
        let s = Summary::of(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn single_replication_has_zero_std() {
        let cfg = quad_config(1.0, 0.1, 4, 1);
        let rec = estimate_expected_error(&cfg).unwrap();
        let run = cfg.run_replication(0).unwrap();
        assert_eq!(rec.final_error_f.mean, run.final_error_f);
        assert_eq!(rec.final_error_f.std, 0.0);
        assert!(rec.trace.iter().all(|p| p.std == 0.0));
    }

    #[test]
    fn zero_noise_has_zero_std() {
        let rec = estimate_expected_error(&quad_config(0.0, 0.0, 4, 12)).unwrap();
        assert_eq!(rec.final_error_f.std, 0.0);
        assert_eq!(rec.final_error_sq.std, 0.0);
        assert!(rec.trace.iter().all(|p| p.std == 0.0));
    }

    #[test]
    fn invalid_config_rejected() {
        let mut cfg = quad_config(0.0, 0.0, 4, 0);
        assert!(estimate_expected_error(&cfg).is_err());
        cfg.replications = 1;
        cfg.horizon = 100;
        assert!(estimate_expected_error(&cfg).is_err());
    }

    #[test]
    fn failing_replication_is_named() {
        let mut cfg = quad_config(0.0, 0.0, 2, 3);
        cfg.steps = StepSchedule::Constant { eta: 50.0 };
        cfg.horizon = 1000;
        cfg.schedule = CommSchedule::one_shot(1000).unwrap();
        match estimate_expected_error(&cfg).unwrap_err() {
            Error::Replication { replication, source } => {
                assert_eq!(replication, 0);
                assert!(matches!(*source, Error::Diverged { .. }));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn family_schedules() {
        let t = 1000;
        assert_eq!(ScheduleFamily::Synchronized.schedule(8, t).unwrap().rounds(), 1000);
        assert_eq!(ScheduleFamily::Growing.schedule(8, t).unwrap().rounds(), 8);
        assert_eq!(ScheduleFamily::Fixed.schedule(8, t).unwrap().rounds(), 8);
        assert_eq!(ScheduleFamily::Fixed.schedule(32, t).unwrap().rounds(), 32);
        assert_eq!(ScheduleFamily::OneShot.schedule(8, t).unwrap().rounds(), 1);
        assert_eq!(ScheduleFamily::GrowingPower(0.5).schedule(64, t).unwrap().rounds(), 8);
        // R clamped to ⌊√2000⌋ = 44, a = 2; capping at T leaves 32 distinct rounds
        assert_eq!(ScheduleFamily::Growing.schedule(256, t).unwrap().rounds(), 32);
        assert_eq!(ScheduleFamily::Growing.schedule(1, t).unwrap().rounds(), 1);
    }

    #[test]
    fn family_names_round_trip() {
        for f in [
            ScheduleFamily::Synchronized,
            ScheduleFamily::Growing,
            ScheduleFamily::Fixed,
            ScheduleFamily::GrowingPower(0.75),
            ScheduleFamily::OneShot,
        ] {
            assert_eq!(f.to_string().parse::<ScheduleFamily>().unwrap(), f);
        }
        assert!("power:-1".parse::<ScheduleFamily>().is_err());
        assert!("weekly".parse::<ScheduleFamily>().is_err());
    }

    #[test]
    fn speedup_of_one_worker_is_one() {
        let base = RunConfig {
            objective: Arc::new(PiecewiseQuadratic1D::new(8.0).unwrap()),
            workers: 1,
            horizon: 300,
            schedule: CommSchedule::one_shot(300).unwrap(),
            steps: StepSchedule::CappedInverseT { mu: 1.0, smoothness: 2.0 },
            x0: Point::filled(1, 1.0),
            replications: 20,
            seed: 3,
            trace_stride: None,
        };
        for fam in [
            ScheduleFamily::Synchronized,
            ScheduleFamily::Growing,
            ScheduleFamily::Fixed,
            ScheduleFamily::OneShot,
        ] {
            let curve = speedup_curve(&base, &[1], fam, Metric::FGap).unwrap();
            assert_eq!(curve[0].speedup, Some(1.0), "{fam}");
            assert_eq!(curve[0].speedup_std, Some(0.0), "{fam}");
        }
        assert!(speedup_curve(&base, &[], ScheduleFamily::Growing, Metric::FGap).is_err());
    }

    #[test]
    fn saturated_ratio() {
        let b = SpeedupBaseline {
            samples: vec![1.0, 2.0],
            metric: Metric::FGap,
        };
        assert_eq!(b.ratio(&[0.0, 0.0]), (None, None));
    }
}

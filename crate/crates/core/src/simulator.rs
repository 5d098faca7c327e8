//! One replication of Local SGD.
//!
//! Every worker starts at `x0`. At step `t` worker `i` draws a stochastic
//! gradient from stream `(seed, replication, i, t)` and moves to
//! `x_i − η_t ĝ_i`. When `t + 1` is a communication time all workers are
//! replaced by the average of their post-step iterates.
//!
//! Averaging is computed as `x_0 + (Σ_{i>0} (x_i − x_0)) / N`, summed in
//! worker order. Identical workers therefore average to exactly their
//! common value, and one worker averages to itself.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{squared_distance, Point};
use crate::objectives::Objective;
use crate::rng::RngStream;
use crate::schedules::{CommSchedule, StepSchedule};

/// Trace stride used when none is given: 1 up to `T = 10⁴`, else `⌈T/10⁴⌉`.
pub fn default_trace_stride(horizon: usize) -> usize {
    horizon.div_ceil(10_000).max(1)
}

/// Outcome of one replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    /// Iterations at which the trace was sampled (multiples of the stride, plus `T`).
    pub trace_t: Vec<usize>,
    /// `f(x̄^t) − f*` at each sampled iteration.
    pub error_trace: Vec<f64>,
    pub final_avg: Point,
    pub final_error_f: f64,
    pub final_error_sq: f64,
}

/// State visible to an observer after step `t` has been applied.
pub struct StepView<'a> {
    /// The new iteration index (`t + 1`).
    pub iteration: usize,
    pub workers: &'a [Vec<f64>],
    /// Across-worker mean `x̄^{t+1}`.
    pub mean: &'a [f64],
    /// On communication steps, the mean of the post-step iterates before
    /// they were replaced by it.
    pub pre_average_mean: Option<&'a [f64]>,
}

/// Local SGD runner for a fixed objective, schedule and step sequence.
pub struct LocalSgd<'a> {
    objective: &'a dyn Objective,
    schedule: &'a CommSchedule,
    steps: &'a StepSchedule,
    workers: usize,
    trace_stride: usize,
}

impl<'a> LocalSgd<'a> {
    pub fn new(
        objective: &'a dyn Objective,
        schedule: &'a CommSchedule,
        steps: &'a StepSchedule,
        workers: usize,
    ) -> Result<Self> {
        if workers < 1 {
            return Err(Error::InvalidArgument("N must be >= 1".into()));
        }
        steps.validate()?;
        Ok(Self {
            objective,
            schedule,
            steps,
            workers,
            trace_stride: default_trace_stride(schedule.horizon()),
        })
    }

    pub fn with_trace_stride(mut self, stride: usize) -> Self {
        self.trace_stride = stride.max(1);
        self
    }

    pub fn run(&self, x0: &Point, stream: RngStream) -> Result<RunResult> {
        self.run_observed(x0, stream, |_| {})
    }

    /// Runs the replication, calling `observe` after every step.
    pub fn run_observed(
        &self,
        x0: &Point,
        stream: RngStream,
        mut observe: impl FnMut(&StepView<'_>),
    ) -> Result<RunResult> {
        let d = self.objective.dim();
        if x0.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                actual: x0.dim(),
            });
        }
        let horizon = self.schedule.horizon();
        let constants = self.objective.constants();
        let f_star = constants.f_star;

        let mut xs: Vec<Vec<f64>> = vec![x0.to_vec(); self.workers];
        let mut mean = x0.to_vec();
        let mut pre = vec![0.0; d];
        let mut grad = vec![0.0; d];

        let mut trace_t = Vec::with_capacity(horizon / self.trace_stride + 2);
        let mut error_trace = Vec::with_capacity(horizon / self.trace_stride + 2);
        trace_t.push(0);
        error_trace.push(self.objective.value_at(&mean) - f_star);

        let taus = self.schedule.taus();
        let mut next_comm = 1;

        for t in 0..horizon {
            let eta = self.steps.step_size(t);
            for (i, x) in xs.iter_mut().enumerate() {
                let s = stream.at(i as u64, t as u64);
                self.objective.stochastic_gradient_into(x, &s, &mut grad);
                for (xj, gj) in x.iter_mut().zip(&grad) {
                    *xj -= eta * gj;
                }
                if x.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Diverged {
                        iteration: t,
                        worker: i,
                    });
                }
            }

            let communicate = taus[next_comm] == t + 1;
            average_into(&xs, &mut mean);
            if communicate {
                next_comm += 1;
                pre.copy_from_slice(&mean);
                for x in xs.iter_mut() {
                    x.copy_from_slice(&pre);
                }
                average_into(&xs, &mut mean);
            }
            observe(&StepView {
                iteration: t + 1,
                workers: &xs,
                mean: &mean,
                pre_average_mean: communicate.then_some(pre.as_slice()),
            });

            if (t + 1) % self.trace_stride == 0 || t + 1 == horizon {
                trace_t.push(t + 1);
                error_trace.push(self.objective.value_at(&mean) - f_star);
            }
        }

        let final_error_f = *error_trace.last().unwrap();
        let final_error_sq = squared_distance(&mean, &constants.x_star);
        Ok(RunResult {
            trace_t,
            error_trace,
            final_avg: Point::from_vec_unchecked(mean),
            final_error_f,
            final_error_sq,
        })
    }
}

/// Across-worker mean, shifted by the first worker and summed in order.
pub fn average_into(xs: &[Vec<f64>], out: &mut [f64]) {
    let first = &xs[0];
    let n = xs.len() as f64;
    for (j, o) in out.iter_mut().enumerate() {
        let base = first[j];
        let mut acc = 0.0;
        for x in &xs[1..] {
            acc += x[j] - base;
        }
        *o = base + acc / n;
    }
}

/// Runs one replication of Local SGD with `N` workers over horizon `T`.
///
/// `stream_base` supplies the seed and replication; worker and iteration
/// coordinates are filled in per draw.
pub fn run_local_sgd(
    objective: &dyn Objective,
    schedule: &CommSchedule,
    steps: &StepSchedule,
    workers: usize,
    horizon: usize,
    x0: &Point,
    stream_base: RngStream,
) -> Result<RunResult> {
    if schedule.horizon() != horizon {
        return Err(Error::InvalidArgument(format!(
            "schedule horizon {} does not match T={horizon}",
            schedule.horizon()
        )));
    }
    LocalSgd::new(objective, schedule, steps, workers)?.run(x0, stream_base)
}

//! Closed-form upper bounds on `E[f(x̄^T)] − f*` (and, for one-shot
//! averaging, on `E‖x̄^T − x*‖²`).
//!
//! All evaluators share the first two terms: the initial-gap decay
//! `β²ξ⁰/T²` and the parallel-SGD variance term `9Lσ²/(2μ²NT)`. They differ
//! only in how the consensus error is charged.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::model::ProblemConstants;
use crate::schedules::{check_beta_condition, max_growing_rounds, CommSchedule, StepSchedule};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub mu: f64,
    pub smoothness: f64,
    pub c: f64,
    pub sigma2: f64,
    pub workers: usize,
    pub horizon: usize,
    pub rounds: usize,
    pub beta: f64,
    /// Initial gap `f(x̄⁰) − f*`.
    pub xi0: f64,
}

impl BoundInputs {
    pub fn from_constants(
        k: &ProblemConstants,
        workers: usize,
        horizon: usize,
        rounds: usize,
        beta: f64,
        xi0: f64,
    ) -> Self {
        Self {
            mu: k.mu,
            smoothness: k.smoothness,
            c: k.c,
            sigma2: k.sigma2,
            workers,
            horizon,
            rounds,
            beta,
            xi0,
        }
    }

    pub fn kappa(&self) -> f64 {
        self.smoothness / self.mu
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.mu, self.smoothness, self.c, self.sigma2, self.beta, self.xi0]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(invalid("bound inputs must be finite"));
        }
        if self.mu <= 0.0 {
            return Err(invalid(format!("mu must be > 0, got {}", self.mu)));
        }
        if self.smoothness < self.mu {
            return Err(invalid("L must be >= mu"));
        }
        if self.c < 0.0 || self.sigma2 < 0.0 {
            return Err(invalid("c and sigma2 must be >= 0"));
        }
        if self.xi0 < 0.0 {
            return Err(invalid("xi0 must be >= 0"));
        }
        if self.beta <= 0.0 {
            return Err(invalid("beta must be > 0"));
        }
        if self.workers < 1 || self.horizon < 1 {
            return Err(invalid("N and T must be >= 1"));
        }
        Ok(())
    }

    fn common_terms(&self) -> f64 {
        let t = self.horizon as f64;
        let n = self.workers as f64;
        self.beta * self.beta * self.xi0 / (t * t)
            + 9.0 * self.smoothness * self.sigma2 / (2.0 * self.mu * self.mu * n * t)
    }

    /// Step sequence `η_t = 3/(μ(t+β))` these bounds assume.
    pub fn steps(&self) -> StepSchedule {
        StepSchedule::InverseT {
            mu: self.mu,
            beta: self.beta,
        }
    }
}

/// Growing-interval bound
/// `β²ξ⁰/T² + 9Lσ²/(2μ²NT) + 144L²σ²/(μ³RT)`, for `1 <= R <= √(2T)`.
pub fn bound_theorem1(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    if b.rounds < 1 || b.rounds > max_growing_rounds(b.horizon) {
        return Err(invalid(format!(
            "R must lie in [1, sqrt(2T)] = [1, {}], got {}",
            max_growing_rounds(b.horizon),
            b.rounds
        )));
    }
    let (l, mu) = (b.smoothness, b.mu);
    let consensus =
        144.0 * l * l * b.sigma2 / (mu.powi(3) * b.rounds as f64 * b.horizon as f64);
    Ok(b.common_terms() + consensus)
}

/// Value of the schedule-dependent bound and whether its `β` condition holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneralBound {
    pub value: f64,
    pub condition_holds: bool,
}

/// Bound for an arbitrary schedule:
/// `β²ξ⁰/T² + 9Lσ²/(2μ²NT) + (18L²σ²/(μ³T²))·Σ_{t<T} (t − τ(t))/(t + β)`.
///
/// The value is returned even when the `β` condition fails; the flag says
/// whether the bound is actually guaranteed.
pub fn bound_general(b: &BoundInputs, schedule: &CommSchedule) -> Result<GeneralBound> {
    b.validate()?;
    if schedule.horizon() != b.horizon {
        return Err(invalid(format!(
            "schedule horizon {} does not match T={}",
            schedule.horizon(),
            b.horizon
        )));
    }
    let (l, mu, t) = (b.smoothness, b.mu, b.horizon as f64);
    let consensus =
        18.0 * l * l * b.sigma2 / (mu.powi(3) * t * t) * schedule.consensus_sum(b.beta);
    let beta_ok = b.beta >= 9.0 * b.kappa()
        && check_beta_condition(schedule, b.beta, b.kappa(), b.c, b.workers);
    Ok(GeneralBound {
        value: b.common_terms() + consensus,
        condition_holds: beta_ok,
    })
}

/// Bound when workers communicate at least every `H` steps:
/// `β²ξ⁰/T² + 9Lσ²/(2μ²NT) + 18L²σ²(H − 1)·ln(1 + T/(β − 1))/(μ³T²)`.
pub fn bound_fixed_interval(b: &BoundInputs, interval: usize) -> Result<f64> {
    b.validate()?;
    if b.beta <= 1.0 {
        return Err(invalid(format!("beta must be > 1, got {}", b.beta)));
    }
    if interval < 1 {
        return Err(invalid("H must be >= 1"));
    }
    let (l, mu, t) = (b.smoothness, b.mu, b.horizon as f64);
    let consensus = 18.0 * l * l * b.sigma2 * (interval - 1) as f64 * (1.0 + t / (b.beta - 1.0)).ln()
        / (mu.powi(3) * t * t);
    Ok(b.common_terms() + consensus)
}

/// Leading term `4σ²/(3μ²NT)` of the one-shot averaging bound on
/// `E‖x̄^T − x*‖²`. Requires `T >= ⌊2L/μ⌋`.
pub fn bound_osa_leading(b: &BoundInputs) -> Result<f64> {
    b.validate()?;
    let t0 = StepSchedule::theta_switch(b.mu, b.smoothness);
    if b.horizon < t0 {
        return Err(invalid(format!(
            "T={} is below t0 = floor(2L/mu) = {t0}",
            b.horizon
        )));
    }
    Ok(4.0 * b.sigma2 / (3.0 * b.mu * b.mu * b.workers as f64 * b.horizon as f64))
}

//! Communication-time sets and step-size sequences.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Communication times `0 = τ_0 < τ_1 < … < τ_R = T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct CommSchedule {
    taus: Vec<usize>,
}

impl CommSchedule {
    /// Validates an explicit list of communication times.
    pub fn from_taus(taus: Vec<usize>) -> Result<Self> {
        if taus.len() < 2 {
            return Err(invalid("schedule needs at least tau_0 = 0 and tau_R = T"));
        }
        if taus[0] != 0 {
            return Err(invalid("schedule must start at 0"));
        }
        if let Some(w) = taus.windows(2).find(|w| w[0] >= w[1]) {
            return Err(invalid(format!(
                "schedule must be strictly increasing ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(Self { taus })
    }

    /// Linearly growing intervals `H_i = a(i+1)` with `a = ⌈2T/R²⌉`, capped
    /// at `T`. Requires `1 <= R <= ⌊√(2T)⌋`.
    pub fn growing(horizon: usize, rounds: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon T must be >= 1"));
        }
        let max_rounds = max_growing_rounds(horizon);
        if rounds < 1 || rounds > max_rounds {
            return Err(invalid(format!(
                "R must lie in [1, {max_rounds}] for T={horizon}, got {rounds}"
            )));
        }
        let a = (2 * horizon).div_ceil(rounds * rounds);
        Self::growing_with_step(horizon, rounds, a)
    }

    /// Growing intervals `H_i = a(i+1)` with an explicit increment `a`.
    ///
    /// Capping at `T` can collapse trailing rounds, so the effective round
    /// count may be below `rounds`. If the requested rounds do not reach `T`,
    /// a final communication at `T` is appended.
    pub fn growing_with_step(horizon: usize, rounds: usize, a: usize) -> Result<Self> {
        if horizon == 0 || rounds == 0 || a == 0 {
            return Err(invalid("T, R and a must all be >= 1"));
        }
        let mut taus = vec![0];
        let mut tau = 0usize;
        for i in 0..rounds {
            tau = (tau + a * (i + 1)).min(horizon);
            if tau > *taus.last().unwrap() {
                taus.push(tau);
            }
            if tau == horizon {
                break;
            }
        }
        if tau < horizon {
            taus.push(horizon);
        }
        Ok(Self { taus })
    }

    /// Communicate every `H` steps; the last interval may be shorter.
    pub fn fixed(horizon: usize, interval: usize) -> Result<Self> {
        if interval < 1 || interval > horizon {
            return Err(invalid(format!(
                "H must lie in [1, T={horizon}], got {interval}"
            )));
        }
        let mut taus: Vec<usize> = (0..horizon).step_by(interval).collect();
        taus.push(horizon);
        Ok(Self { taus })
    }

    /// Fully synchronized SGD: communicate after every step.
    pub fn synchronized(horizon: usize) -> Result<Self> {
        Self::fixed(horizon, 1)
    }

    /// One-shot averaging: a single communication at `T`.
    pub fn one_shot(horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(invalid("horizon T must be >= 1"));
        }
        Ok(Self {
            taus: vec![0, horizon],
        })
    }

    pub fn taus(&self) -> &[usize] {
        &self.taus
    }

    pub fn horizon(&self) -> usize {
        *self.taus.last().unwrap()
    }

    /// Number of communication rounds `R`.
    pub fn rounds(&self) -> usize {
        self.taus.len() - 1
    }

    /// Interval lengths `H_i = τ_{i+1} − τ_i`.
    pub fn intervals(&self) -> impl Iterator<Item = usize> + '_ {
        self.taus.windows(2).map(|w| w[1] - w[0])
    }

    /// Most recent communication time `τ(t) = max{τ ∈ taus : τ <= t}`.
    pub fn tau_of(&self, t: usize) -> usize {
        let k = self.taus.partition_point(|&tau| tau <= t);
        self.taus[k - 1]
    }

    /// Whether `t` is a communication time (`τ_0 = 0` counts).
    pub fn is_communication(&self, t: usize) -> bool {
        self.taus.binary_search(&t).is_ok()
    }

    /// `Σ_{t=0}^{T-1} (t − τ(t)) / (t + β)`, the consensus-error weight.
    pub fn consensus_sum(&self, beta: f64) -> f64 {
        let mut sum = 0.0;
        for w in self.taus.windows(2) {
            let start = w[0];
            for t in start..w[1] {
                sum += (t - start) as f64 / (t as f64 + beta);
            }
        }
        sum
    }
}

impl TryFrom<Vec<usize>> for CommSchedule {
    type Error = crate::Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::from_taus(v)
    }
}

impl From<CommSchedule> for Vec<usize> {
    fn from(s: CommSchedule) -> Self {
        s.taus
    }
}

/// `⌊√(2T)⌋`, the largest round count the growing schedule accepts.
pub fn max_growing_rounds(horizon: usize) -> usize {
    let n = 2 * horizon;
    let mut r = (n as f64).sqrt() as usize;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Smallest `β` admitted by the growing-interval convergence theorem:
/// `max{9κ, 12κ²c·max{ln 3, ln(1 + T/(4κR²))} + 3κ(1 + c/N)}`.
pub fn beta_min(kappa: f64, c: f64, workers: usize, horizon: usize, rounds: usize) -> Result<f64> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(invalid(format!("kappa must be >= 1, got {kappa}")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(invalid(format!("c must be >= 0, got {c}")));
    }
    if workers < 1 || rounds < 1 {
        return Err(invalid("N and R must be >= 1"));
    }
    let growth = (1.0 + horizon as f64 / (4.0 * kappa * (rounds * rounds) as f64))
        .ln()
        .max(3f64.ln());
    let noise = 12.0 * kappa * kappa * c * growth + 3.0 * kappa * (1.0 + c / workers as f64);
    Ok(noise.max(9.0 * kappa))
}

/// Checks, for every interval `i`,
/// `12κ²c·ln(1 + (H_i − 1)/(τ_i + β)) + 3κ(1 + c/N) − (τ_i + β) <= 0`.
pub fn check_beta_condition(
    schedule: &CommSchedule,
    beta: f64,
    kappa: f64,
    c: f64,
    workers: usize,
) -> bool {
    let base = 3.0 * kappa * (1.0 + c / workers as f64);
    schedule.taus.windows(2).all(|w| {
        let tau = w[0] as f64;
        let h = (w[1] - w[0]) as f64;
        12.0 * kappa * kappa * c * (1.0 + (h - 1.0) / (tau + beta)).ln() + base - (tau + beta)
            <= 0.0
    })
}

/// Step-size sequence `t ↦ η_t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    /// `η_t = 3 / (μ(t + β))`.
    InverseT { mu: f64, beta: f64 },
    /// `1/L` for `t < t_0 = ⌊2L/μ⌋`, then `2t / (μ(t+1)²)`.
    Theta { mu: f64, smoothness: f64 },
    Constant { eta: f64 },
    /// `min{1/L, 2/(μ(t+1))}`.
    CappedInverseT { mu: f64, smoothness: f64 },
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be > 0, got {v}")))
            }
        };
        match *self {
            Self::InverseT { mu, beta } => {
                positive("mu", mu)?;
                positive("beta", beta)
            }
            Self::Theta { mu, smoothness } | Self::CappedInverseT { mu, smoothness } => {
                positive("mu", mu)?;
                positive("L", smoothness)
            }
            Self::Constant { eta } => positive("eta", eta),
        }
    }

    /// `t_0 = ⌊2L/μ⌋` for the theta schedule.
    pub fn theta_switch(mu: f64, smoothness: f64) -> usize {
        (2.0 * smoothness / mu).floor() as usize
    }

    pub fn step_size(&self, t: usize) -> f64 {
        let tf = t as f64;
        match *self {
            Self::InverseT { mu, beta } => 3.0 / (mu * (tf + beta)),
            Self::Theta { mu, smoothness } => {
                if t < Self::theta_switch(mu, smoothness) {
                    1.0 / smoothness
                } else {
                    2.0 * tf / (mu * (tf + 1.0) * (tf + 1.0))
                }
            }
            Self::Constant { eta } => eta,
            Self::CappedInverseT { mu, smoothness } => {
                (1.0 / smoothness).min(2.0 / (mu * (tf + 1.0)))
            }
        }
    }
}

//! Counter-based random streams.
//!
//! Every draw is a pure function of `(seed, replication, worker, iteration,
//! draw index)`. Nothing is advanced in place, so the order in which workers
//! or replications are evaluated never changes the numbers they see.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Coordinates of a random stream. Cheap to copy; never mutated in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub replication: u64,
    pub worker: u64,
    pub iteration: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            replication: 0,
            worker: 0,
            iteration: 0,
        }
    }

    pub fn with_replication(self, replication: u64) -> Self {
        Self {
            replication,
            ..self
        }
    }

    /// Stream for one worker at one iteration of the current replication.
    pub fn at(self, worker: u64, iteration: u64) -> Self {
        Self {
            worker,
            iteration,
            ..self
        }
    }

    /// Precomputes the stream key for repeated draws at these coordinates.
    pub fn sampler(&self) -> Sampler {
        Sampler { key: self.key() }
    }

    fn key(&self) -> u64 {
        let mut k = mix64(self.seed ^ 0x243F_6A88_85A3_08D3);
        k = mix64(k ^ self.replication.wrapping_mul(0xA076_1D64_78BD_642F));
        k = mix64(k ^ self.worker.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        mix64(k ^ self.iteration.wrapping_mul(0x8EBC_6AF0_9C88_C6E3))
    }

    /// Raw 64 random bits for the given draw index.
    pub fn bits(&self, draw: u64) -> u64 {
        self.sampler().bits(draw)
    }

    /// Uniform sample in the open interval (0, 1).
    pub fn uniform(&self, draw: u64) -> f64 {
        self.sampler().uniform(draw)
    }

    /// Uniform integer in `0..n`. `n` must be nonzero.
    pub fn index(&self, draw: u64, n: usize) -> usize {
        debug_assert!(n > 0);
        // multiply-shift; bias is below 2^-32 for any n we use
        self.sampler().index(draw, n)
    }

    /// Standard normal sample for the given draw index (Box–Muller; draws
    /// `2k` and `2k+1` share one uniform pair).
    pub fn standard_normal(&self, draw: u64) -> f64 {
        self.sampler().standard_normal(draw)
    }

    /// Fills `out` with the standard normals at draw indices
    /// `offset..offset + out.len()`. `offset` must be even.
    pub fn fill_standard_normal(&self, offset: u64, out: &mut [f64]) {
        debug_assert!(offset.is_multiple_of(2));
        let key = self.key();
        let mut pair = offset / 2;
        let mut chunks = out.chunks_exact_mut(2);
        for c in &mut chunks {
            let (a, b) = normal_pair(key, pair);
            c[0] = a;
            c[1] = b;
            pair += 1;
        }
        if let [last] = chunks.into_remainder() {
            *last = normal_pair(key, pair).0;
        }
    }

    /// Sample from `N(mean, variance)` at the given draw index.
    pub fn gaussian(&self, draw: u64, mean: f64, variance: f64) -> Result<f64> {
        if !variance.is_finite() || variance < 0.0 {
            return Err(invalid(format!("variance must be >= 0, got {variance}")));
        }
        if variance == 0.0 {
            return Ok(mean);
        }
        Ok(mean + variance.sqrt() * self.standard_normal(draw))
    }
}

/// A stream with its coordinate key already hashed. Produces exactly the
/// same values as the [`RngStream`] it came from.
#[derive(Debug, Clone, Copy)]
pub struct Sampler {
    key: u64,
}

impl Sampler {
    pub fn bits(&self, draw: u64) -> u64 {
        bits_from_key(self.key, draw)
    }

    pub fn uniform(&self, draw: u64) -> f64 {
        unit_open(self.bits(draw))
    }

    pub fn index(&self, draw: u64, n: usize) -> usize {
        ((u128::from(self.bits(draw)) * n as u128) >> 64) as usize
    }

    /// The two standard normals at draw indices `2 * pair` and `2 * pair + 1`.
    pub fn normal_pair(&self, pair: u64) -> (f64, f64) {
        normal_pair(self.key, pair)
    }

    pub fn standard_normal(&self, draw: u64) -> f64 {
        let (a, b) = normal_pair(self.key, draw / 2);
        if draw.is_multiple_of(2) {
            a
        } else {
            b
        }
    }
}

/// One Gaussian draw from the stream (draw index 0).
pub fn gaussian_draw(stream: &RngStream, mean: f64, variance: f64) -> Result<f64> {
    stream.gaussian(0, mean, variance)
}

#[inline]
fn bits_from_key(key: u64, draw: u64) -> u64 {
    mix64(key.wrapping_add(draw.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[inline]
fn unit_open(bits: u64) -> f64 {
    ((bits >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

#[inline]
fn normal_pair(key: u64, pair: u64) -> (f64, f64) {
    let u1 = unit_open(bits_from_key(key, 2 * pair));
    let u2 = unit_open(bits_from_key(key, 2 * pair + 1));
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

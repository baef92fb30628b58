//! Benchmark objective `f(x) = −sin(3x²) − x² + 1.3x` with additive Gaussian
//! observation noise, and a dense-grid oracle for its optimum.
//!
//! Random streams come from ChaCha20 (`rand_chacha`), which produces the same
//! sequence on every platform for a given seed and stream id.

use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// ChaCha stream id used for observation noise.
pub const NOISE_STREAM: u64 = 1;
/// ChaCha stream id used for multi-start restart points.
pub const RESTART_STREAM: u64 = 2;

/// Generator for one of the run's disjoint random streams.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn evaluate(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain { what: "objective", value: x });
    }
    Ok(objective_unchecked(x))
}

#[inline]
pub fn objective_unchecked(x: f64) -> f64 {
    let x2 = x * x;
    -(3.0 * x2).sin() - x2 + 1.3 * x
}

/// The benchmark objective observed through homoscedastic Gaussian noise.
#[derive(Debug, Clone)]
pub struct NoisyObjective {
    noise_std: f64,
    rng: ChaCha20Rng,
}

impl NoisyObjective {
    pub fn new(noise_std: f64, rng: ChaCha20Rng) -> Result<Self> {
        if !(noise_std >= 0.0 && noise_std.is_finite()) {
            return Err(Error::contract(format!("noise_std must be finite and non-negative, got {noise_std}")));
        }
        Ok(Self { noise_std, rng })
    }

    /// Noise drawn from the run's noise stream of `seed`.
    pub fn seeded(noise_std: f64, seed: u64) -> Result<Self> {
        Self::new(noise_std, stream_rng(seed, NOISE_STREAM))
    }

    pub fn noise_std(&self) -> f64 {
        self.noise_std
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_std * self.noise_std
    }

    /// `f(x) + noise_std·z`; always advances the generator.
    pub fn evaluate_noisy(&mut self, x: f64) -> Result<f64> {
        let clean = evaluate(x)?;
        let z: f64 = StandardNormal.sample(&mut self.rng);
        if self.noise_std == 0.0 {
            return Ok(clean);
        }
        Ok(clean + self.noise_std * z)
    }
}

/// Maximum of `f` over `n_points` evenly spaced points (endpoints included).
/// Ties keep the lowest `x`.
pub fn grid_argmax(f: impl Fn(f64) -> f64, lower: f64, upper: f64, n_points: usize) -> Result<(f64, f64)> {
    if n_points < 2 || !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
        return Err(Error::contract(format!(
            "grid needs lower < upper and at least 2 points, got [{lower}, {upper}] with {n_points}"
        )));
    }
    let step = (upper - lower) / (n_points - 1) as f64;
    let mut best = (lower, f(lower));
    for i in 1..n_points {
        let x = if i == n_points - 1 { upper } else { lower + i as f64 * step };
        let v = f(x);
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

/// Grid optimum of the benchmark objective.
pub fn objective_grid_argmax(lower: f64, upper: f64, n_points: usize) -> Result<(f64, f64)> {
    grid_argmax(objective_unchecked, lower, upper, n_points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn objective_values() {
        assert_eq!(evaluate(0.0).unwrap(), 0.0);
        assert!((evaluate(1.0).unwrap() - 0.15887999194013278).abs() < 1e-15);
        assert!((evaluate(-1.0).unwrap() + 2.441120008059867).abs() < 1e-15);
        assert!(evaluate(f64::NAN).is_err());
    }

    #[test]
    fn zero_noise_is_exact() {
        let mut obj = NoisyObjective::seeded(0.0, 42).unwrap();
        for x in [-1.3, 0.0, 0.7] {
            assert_eq!(obj.evaluate_noisy(x).unwrap(), evaluate(x).unwrap());
        }
    }

    #[test]
    fn generator_advances() {
        let mut obj = NoisyObjective::seeded(0.2, 42).unwrap();
        let a = obj.evaluate_noisy(0.5).unwrap();
        let b = obj.evaluate_noisy(0.5).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn noise_mean_is_near_zero() {
        let sd = 0.2;
        let mut obj = NoisyObjective::seeded(sd, 7).unwrap();
        let n = 10_000;
        let mean = (0..n).map(|_| obj.evaluate_noisy(0.0).unwrap()).sum::<f64>() / n as f64;
        assert!(mean.abs() <= 4.0 * sd / 100.0, "mean {mean}");
    }

    #[test]
    fn streams_differ() {
        let mut a = NoisyObjective::seeded(1.0, 5).unwrap();
        let mut b = NoisyObjective::new(1.0, stream_rng(5, RESTART_STREAM)).unwrap();
        assert_ne!(a.evaluate_noisy(0.0).unwrap(), b.evaluate_noisy(0.0).unwrap());
    }

    #[test]
    fn grid_examples() {
        assert_eq!(grid_argmax(|_| 0.0, 0.0, 1.0, 11).unwrap(), (0.0, 0.0));
        let (x, _) = grid_argmax(|x| -(x - 3.0).powi(2), 0.0, 10.0, 1_000_001).unwrap();
        assert!((x - 3.0).abs() <= 1e-5);
        assert!(grid_argmax(|x| x, 1.0, 0.0, 10).is_err());
        assert!(grid_argmax(|x| x, 0.0, 1.0, 1).is_err());
    }

    #[test]
    fn grid_refinement_is_monotone() {
        let coarse = objective_grid_argmax(-2.0, 2.0, 1_000).unwrap();
        let fine = objective_grid_argmax(-2.0, 2.0, 1_000_000).unwrap();
        assert!(fine.1 >= coarse.1);
    }
}

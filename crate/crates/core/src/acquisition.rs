//! Expected Improvement and (Maximum) Probability of Improvement.
//!
//! Both compare the posterior at `x` against the incumbent `f⁺`, the best
//! observed (noisy) value, shifted by the margin `ξ`. With
//! `Δ = μ(x) − f⁺ − ξ` and `Z = Δ/σ(x)`:
//!
//! ```text
//! PI(x) = Φ(Z)
//! EI(x) = Δ·Φ(Z) + σ(x)·φ(Z)      (σ > 0),   0 otherwise
//! ```
//!
//! The improvement term uses `f⁺` in both places; reading the first EI term
//! as `f(x)` would make the criterion depend on the unobserved objective.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gp::{Dataset, GpPosterior};
use crate::optimize::Bounds;
use crate::stats::{cdf_unchecked, pdf_unchecked};

/// Posterior standard deviations below this are treated as exactly zero.
pub const SIGMA_FLOOR: f64 = 1e-8;

/// Default improvement margin `ξ`.
pub const DEFAULT_XI: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AcquisitionKind {
    Ei,
    Mpi,
}

impl AcquisitionKind {
    pub const ALL: [AcquisitionKind; 2] = [AcquisitionKind::Mpi, AcquisitionKind::Ei];

    pub fn name(self) -> &'static str {
        match self {
            AcquisitionKind::Ei => "ei",
            AcquisitionKind::Mpi => "mpi",
        }
    }
}

impl std::fmt::Display for AcquisitionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AcquisitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ei" => Ok(AcquisitionKind::Ei),
            "mpi" | "pi" => Ok(AcquisitionKind::Mpi),
            _ => Err(Error::contract(format!("unknown acquisition '{s}' (expected ei or mpi)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcquisitionConfig {
    pub kind: AcquisitionKind,
    pub xi: f64,
}

impl AcquisitionConfig {
    pub fn new(kind: AcquisitionKind, xi: f64) -> Result<Self> {
        if !(xi >= 0.0 && xi.is_finite()) {
            return Err(Error::contract(format!("xi must be finite and non-negative, got {xi}")));
        }
        Ok(Self { kind, xi })
    }

    pub fn value(&self, post: &GpPosterior, x: &[f64], inc: &Incumbent) -> Result<f64> {
        match self.kind {
            AcquisitionKind::Ei => expected_improvement(post, x, inc, self.xi),
            AcquisitionKind::Mpi => probability_of_improvement(post, x, inc, self.xi),
        }
    }

    /// Central finite-difference gradient with per-dimension step
    /// `1e-6·max(1, |x_i|)`.
    pub fn gradient(&self, post: &GpPosterior, x: &[f64], inc: &Incumbent) -> Result<Vec<f64>> {
        self.fd_gradient(post, x, inc, None)
    }

    /// Same stencil as [`AcquisitionConfig::gradient`], but shortened on the
    /// side of a bound so that no evaluation leaves the box.
    pub fn gradient_within(&self, post: &GpPosterior, x: &[f64], inc: &Incumbent, bounds: &Bounds) -> Result<Vec<f64>> {
        self.fd_gradient(post, x, inc, Some(bounds))
    }

    fn fd_gradient(&self, post: &GpPosterior, x: &[f64], inc: &Incumbent, bounds: Option<&Bounds>) -> Result<Vec<f64>> {
        let mut probe = x.to_vec();
        let mut grad = Vec::with_capacity(x.len());
        for i in 0..x.len() {
            let h = 1e-6 * x[i].abs().max(1.0);
            let (mut hi, mut lo) = (x[i] + h, x[i] - h);
            if let Some(b) = bounds {
                hi = hi.min(b.upper()[i]);
                lo = lo.max(b.lower()[i]);
            }
            probe[i] = hi;
            let f_hi = self.value(post, &probe, inc)?;
            probe[i] = lo;
            let f_lo = self.value(post, &probe, inc)?;
            probe[i] = x[i];
            grad.push((f_hi - f_lo) / (hi - lo));
        }
        Ok(grad)
    }
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self { kind: AcquisitionKind::Ei, xi: DEFAULT_XI }
    }
}

/// Best observed location and value so far.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Incumbent {
    pub x_plus: Vec<f64>,
    pub f_plus: f64,
}

impl Incumbent {
    /// Observation with the largest `y`; ties go to the earliest one.
    pub fn from_dataset(data: &Dataset) -> Result<Self> {
        let mut best: Option<usize> = None;
        for (i, y) in data.values().iter().enumerate() {
            if best.is_none_or(|b| *y > data.values()[b]) {
                best = Some(i);
            }
        }
        let i = best.ok_or_else(|| Error::contract("incumbent of an empty dataset"))?;
        Ok(Self { x_plus: data.points()[i].clone(), f_plus: data.values()[i] })
    }
}

/// `Φ((μ − f⁺ − ξ)/σ)`; for `σ` below [`SIGMA_FLOOR`] this is the limit
/// `σ → 0⁺`: 1 if `μ > f⁺ + ξ`, else 0.
pub fn probability_of_improvement_from_moments(mu: f64, sigma: f64, f_plus: f64, xi: f64) -> Result<f64> {
    let delta = mu - f_plus - xi;
    check_finite(&[mu, sigma, delta])?;
    if sigma < SIGMA_FLOOR {
        return Ok(if delta > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(cdf_unchecked(delta / sigma))
}

/// `Δ·Φ(Z) + σ·φ(Z)`, or 0 when `σ` is below [`SIGMA_FLOOR`]. Clamped at 0
/// against rounding in the far lower tail.
pub fn expected_improvement_from_moments(mu: f64, sigma: f64, f_plus: f64, xi: f64) -> Result<f64> {
    let delta = mu - f_plus - xi;
    check_finite(&[mu, sigma, delta])?;
    if sigma < SIGMA_FLOOR {
        return Ok(0.0);
    }
    let z = delta / sigma;
    let ei = delta * cdf_unchecked(z) + sigma * pdf_unchecked(z);
    Ok(ei.max(0.0))
}

fn check_finite(values: &[f64]) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Numeric { quantity: "acquisition intermediate", point: values.to_vec() })
    }
}

pub fn probability_of_improvement(post: &GpPosterior, x: &[f64], inc: &Incumbent, xi: f64) -> Result<f64> {
    let (mu, sigma) = post.predict(x)?;
    probability_of_improvement_from_moments(mu, sigma, inc.f_plus, xi)
}

pub fn expected_improvement(post: &GpPosterior, x: &[f64], inc: &Incumbent, xi: f64) -> Result<f64> {
    let (mu, sigma) = post.predict(x)?;
    expected_improvement_from_moments(mu, sigma, inc.f_plus, xi)
}

//! Bounded maximization of smooth functions.
//!
//! Both methods minimize the negated objective internally. Box constraints
//! are handled by projection: every trial point is clamped into the box and
//! convergence is judged on the projected gradient.

mod lbfgs;
mod line_search;
mod multistart;
mod tnc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use lbfgs::lbfgs_maximize;
pub use multistart::{propose_next_sample, Proposal};
pub use tnc::tnc_maximize;

/// Axis-aligned search box, inclusive on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Error::check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::contract("bounds need at least one dimension"));
        }
        for (lo, hi) in lower.iter().zip(&upper) {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::contract(format!("invalid interval [{lo}, {hi}]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn interval(lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower], vec![upper])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && x.iter().zip(&self.lower).zip(&self.upper).all(|((v, lo), hi)| lo <= v && v <= hi)
    }

    pub fn clamp(&self, x: &mut [f64]) {
        for ((v, lo), hi) in x.iter_mut().zip(&self.lower).zip(&self.upper) {
            *v = v.clamp(*lo, *hi);
        }
    }

    /// Gradient of a minimization problem with the components zeroed where
    /// a bound is active and a descent step would leave the box.
    pub(crate) fn project_gradient(&self, x: &[f64], g: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(g)
            .zip(self.lower.iter().zip(&self.upper))
            .map(|((xi, gi), (lo, hi))| if (*xi <= *lo && *gi > 0.0) || (*xi >= *hi && *gi < 0.0) { 0.0 } else { *gi })
            .collect()
    }

    /// Zeroes the direction components that would immediately leave the box.
    pub(crate) fn mask_direction(&self, x: &[f64], d: &mut [f64]) {
        for (((di, xi), lo), hi) in d.iter_mut().zip(x).zip(&self.lower).zip(&self.upper) {
            if (*xi <= *lo && *di < 0.0) || (*xi >= *hi && *di > 0.0) {
                *di = 0.0;
            }
        }
    }

    /// `n` evenly spaced points per dimension, endpoints included. Only
    /// defined for one-dimensional boxes.
    pub fn linspace(&self, n: usize) -> Option<Vec<f64>> {
        if self.dim() != 1 || n < 2 {
            return None;
        }
        Some(linspace(self.lower[0], self.upper[0], n))
    }
}

pub(crate) fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo + i as f64 * step }).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lbfgs,
    Tnc,
}

impl Method {
    pub const ALL: [Method; 2] = [Method::Lbfgs, Method::Tnc];

    pub fn name(self) -> &'static str {
        match self {
            Method::Lbfgs => "lbfgs",
            Method::Tnc => "tnc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lbfgs" | "l-bfgs" => Ok(Method::Lbfgs),
            "tnc" => Ok(Method::Tnc),
            _ => Err(Error::contract(format!("unknown optimizer '{s}' (expected lbfgs or tnc)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSettings {
    /// Number of stored `(s, y)` pairs for the quasi-Newton update.
    pub memory: usize,
    pub max_iterations: usize,
    /// Stop once the infinity norm of the projected gradient falls below this.
    pub gradient_tolerance: f64,
    /// Inner conjugate-gradient cap for the truncated Newton method.
    /// `None` means twice the problem dimension.
    pub cg_max_iterations: Option<usize>,
    pub cg_residual_tolerance: f64,
    pub line_search_c1: f64,
    pub line_search_c2: f64,
    pub line_search_max_steps: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            memory: 10,
            max_iterations: 200,
            gradient_tolerance: 1e-8,
            cg_max_iterations: None,
            cg_residual_tolerance: 1e-8,
            line_search_c1: 1e-4,
            line_search_c2: 0.9,
            line_search_max_steps: 40,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.memory >= 1
            && self.gradient_tolerance > 0.0
            && self.cg_residual_tolerance > 0.0
            && self.cg_max_iterations != Some(0)
            && self.line_search_max_steps >= 1
            && 0.0 < self.line_search_c1
            && self.line_search_c1 < self.line_search_c2
            && self.line_search_c2 < 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::contract(format!("invalid optimizer settings: {self:?}")))
        }
    }

    pub(crate) fn cg_cap(&self, dim: usize) -> usize {
        self.cg_max_iterations.unwrap_or(2 * dim)
    }
}

/// Outcome of one optimization run (or a whole multi-start procedure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerReport {
    pub x_best: Vec<f64>,
    pub value_best: f64,
    pub n_function_evals: usize,
    pub n_gradient_evals: usize,
    pub iterations: usize,
    /// Wall-clock seconds.
    pub elapsed: f64,
    pub restarts_run: usize,
    pub converged: bool,
}

/// Counts evaluations and rejects non-finite values for the minimization of
/// `-objective`.
pub(crate) struct Problem<F, G> {
    objective: F,
    gradient: G,
    pub n_f: usize,
    pub n_g: usize,
}

impl<F, G> Problem<F, G>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    pub fn new(objective: F, gradient: G) -> Self {
        Self { objective, gradient, n_f: 0, n_g: 0 }
    }

    /// Negated objective value.
    pub fn value(&mut self, x: &[f64]) -> Result<f64> {
        self.n_f += 1;
        let v = (self.objective)(x);
        if v.is_finite() {
            Ok(-v)
        } else {
            Err(Error::Numeric { quantity: "objective", point: x.to_vec() })
        }
    }

    /// Negated gradient.
    pub fn gradient(&mut self, x: &[f64]) -> Result<Vec<f64>> {
        self.n_g += 1;
        let mut g = (self.gradient)(x);
        if g.len() != x.len() {
            return Err(Error::DimensionMismatch { expected: x.len(), found: g.len() });
        }
        if g.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { quantity: "gradient", point: x.to_vec() });
        }
        g.iter_mut().for_each(|v| *v = -*v);
        Ok(g)
    }
}

pub(crate) fn check_start(start: &[f64], bounds: &Bounds, settings: &OptimizerSettings) -> Result<()> {
    settings.validate()?;
    Error::check_dim(bounds.dim(), start.len())?;
    if !bounds.contains(start) {
        return Err(Error::contract(format!("start point {start:?} lies outside the bounds")));
    }
    Ok(())
}

pub(crate) fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

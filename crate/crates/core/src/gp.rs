//! Zero-mean Gaussian-process regression with a Matérn 5/2 prior.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{kernel_matrix, matern52_unchecked, KernelParams};
use crate::stats::{cholesky, dot, LowerTriangularFactor};

/// Initial diagonal jitter, relative to `theta0`.
pub const JITTER_START: f64 = 1e-10;
/// Largest diagonal jitter tried before the fit is abandoned, relative to `theta0`.
pub const JITTER_MAX: f64 = 1e-4;

/// Observed pairs `(x_i, y_i)` with homoscedastic observation noise variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    dim: usize,
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    noise_variance: f64,
}

impl Dataset {
    pub fn new(dim: usize, noise_variance: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::contract("dataset dimension must be at least 1"));
        }
        if !(noise_variance >= 0.0 && noise_variance.is_finite()) {
            return Err(Error::contract(format!(
                "noise variance must be finite and non-negative, got {noise_variance}"
            )));
        }
        Ok(Self { dim, points: Vec::new(), values: Vec::new(), noise_variance })
    }

    pub fn from_observations(points: Vec<Vec<f64>>, values: Vec<f64>, noise_variance: f64) -> Result<Self> {
        let dim =
            points.first().map(Vec::len).ok_or_else(|| Error::contract("use Dataset::new for an empty dataset"))?;
        Error::check_dim(points.len(), values.len())?;
        let mut data = Self::new(dim, noise_variance)?;
        for (x, y) in points.into_iter().zip(values) {
            data.push(x, y)?;
        }
        Ok(data)
    }

    pub fn push(&mut self, x: Vec<f64>, y: f64) -> Result<()> {
        Error::check_dim(self.dim, x.len())?;
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { quantity: "observation", point: x });
        }
        self.points.push(x);
        self.values.push(y);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn noise_variance(&self) -> f64 {
        self.noise_variance
    }
}

/// Fitted posterior. Immutable; prediction only borrows it.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    data: Dataset,
    params: KernelParams,
    factor: Option<LowerTriangularFactor>,
    alpha: Vec<f64>,
    jitter: f64,
}

impl GpPosterior {
    /// Factors `K + (v + jitter)·I`, escalating the jitter tenfold from
    /// `1e-10·θ0` up to `1e-4·θ0` when the factorization fails.
    pub fn fit(data: Dataset, params: KernelParams) -> Result<Self> {
        Error::check_dim(params.dim(), data.dim())?;
        if data.is_empty() {
            return Ok(Self { data, params, factor: None, alpha: Vec::new(), jitter: 0.0 });
        }
        let gram = kernel_matrix(data.points(), data.points(), &params)?;
        let theta0 = params.theta0();
        let mut rel = JITTER_START;
        let mut last_err = None;
        while rel <= JITTER_MAX * (1.0 + 1e-9) {
            let jitter = rel * theta0;
            let mut k = gram.clone();
            k.add_diagonal(data.noise_variance() + jitter);
            match cholesky(&k) {
                Ok(factor) => {
                    let alpha = factor.solve(data.values())?;
                    return Ok(Self { data, params, factor: Some(factor), alpha, jitter });
                }
                Err(e) => last_err = Some(e),
            }
            rel *= 10.0;
        }
        Err(Error::Fit(format!(
            "kernel matrix not positive definite with jitter up to {:e}: {}",
            JITTER_MAX * theta0,
            last_err.expect("at least one attempt")
        )))
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// Diagonal jitter that made the fit succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Latent-function predictive mean and standard deviation at `x`.
    /// The observation noise is not included in `sigma`.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        Error::check_dim(self.data.dim(), x.len())?;
        let theta0 = self.params.theta0();
        let Some(factor) = &self.factor else {
            return Ok((0.0, theta0.sqrt()));
        };
        let k_star: Vec<f64> = self.data.points().iter().map(|p| matern52_unchecked(x, p, &self.params)).collect();
        let mu = dot(&k_star, &self.alpha);
        let v = factor.forward_solve(&k_star)?;
        let var = theta0 - dot(&v, &v);
        let sigma = var.max(0.0).sqrt();
        if !mu.is_finite() || !sigma.is_finite() {
            return Err(Error::Numeric { quantity: "posterior moments", point: x.to_vec() });
        }
        Ok((mu, sigma))
    }
}

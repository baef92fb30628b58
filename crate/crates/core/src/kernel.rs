//! Matérn 5/2 covariance.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::Matrix;

/// Signal variance `theta0` and per-dimension lengthscales.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    theta0: f64,
    lengthscales: Vec<f64>,
}

impl KernelParams {
    pub fn new(theta0: f64, lengthscales: Vec<f64>) -> Result<Self> {
        if !(theta0 > 0.0 && theta0.is_finite()) {
            return Err(Error::contract(format!("theta0 must be positive, got {theta0}")));
        }
        if lengthscales.is_empty() {
            return Err(Error::contract("at least one lengthscale is required"));
        }
        if let Some(l) = lengthscales.iter().find(|l| !(**l > 0.0 && l.is_finite())) {
            return Err(Error::contract(format!("lengthscales must be positive, got {l}")));
        }
        Ok(Self { theta0, lengthscales })
    }

    /// Same lengthscale in every dimension.
    pub fn isotropic(theta0: f64, lengthscale: f64, dim: usize) -> Result<Self> {
        Self::new(theta0, vec![lengthscale; dim])
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    pub fn lengthscales(&self) -> &[f64] {
        &self.lengthscales
    }

    pub fn dim(&self) -> usize {
        self.lengthscales.len()
    }
}

impl Default for KernelParams {
    fn default() -> Self {
        Self { theta0: 1.0, lengthscales: vec![1.0] }
    }
}

/// `Σ_d ((x_d − x'_d)/ℓ_d)²`
pub fn scaled_sq_dist(x: &[f64], x_prime: &[f64], lengthscales: &[f64]) -> Result<f64> {
    Error::check_dim(lengthscales.len(), x.len())?;
    Error::check_dim(lengthscales.len(), x_prime.len())?;
    Ok(sq_dist_unchecked(x, x_prime, lengthscales))
}

#[inline]
fn sq_dist_unchecked(x: &[f64], x_prime: &[f64], lengthscales: &[f64]) -> f64 {
    x.iter()
        .zip(x_prime)
        .zip(lengthscales)
        .map(|((a, b), l)| {
            let d = (a - b) / l;
            d * d
        })
        .sum()
}

/// Kernel value as a function of the scaled squared distance.
#[inline]
pub fn matern52_from_sq_dist(r2: f64, theta0: f64) -> f64 {
    let s = (5.0 * r2).sqrt();
    theta0 * (1.0 + s + 5.0 / 3.0 * r2) * (-s).exp()
}

pub fn matern52(x: &[f64], x_prime: &[f64], params: &KernelParams) -> Result<f64> {
    let r2 = scaled_sq_dist(x, x_prime, &params.lengthscales)?;
    Ok(matern52_from_sq_dist(r2, params.theta0))
}

pub(crate) fn matern52_unchecked(x: &[f64], x_prime: &[f64], params: &KernelParams) -> f64 {
    matern52_from_sq_dist(sq_dist_unchecked(x, x_prime, &params.lengthscales), params.theta0)
}

/// Cross-covariance matrix with entry `(i, j) = k(a_i, b_j)`.
pub fn kernel_matrix(a: &[Vec<f64>], b: &[Vec<f64>], params: &KernelParams) -> Result<Matrix> {
    let d = params.dim();
    for p in a.iter().chain(b) {
        Error::check_dim(d, p.len())?;
    }
    let mut k = Matrix::zeros(a.len(), b.len());
    for (i, ai) in a.iter().enumerate() {
        for (j, bj) in b.iter().enumerate() {
            k[(i, j)] = matern52_unchecked(ai, bj, params);
        }
    }
    Ok(k)
}

use rand_core::RngCore;
use rand_distr::{Distribution, Uniform};
use web_time::Instant;

use crate::acquisition::{AcquisitionConfig, Incumbent};
use crate::error::{Error, Result};
use crate::gp::GpPosterior;
use crate::optimize::{lbfgs_maximize, tnc_maximize, Bounds, Method, OptimizerReport, OptimizerSettings};

#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    pub x_next: Vec<f64>,
    pub report: OptimizerReport,
}

/// Maximizes the acquisition surface from `n_restarts` uniform random starts
/// and returns the best terminal point.
///
/// Restarts run sequentially; `report.elapsed` covers the whole procedure
/// including start-point sampling. Ties between restarts keep the earlier one.
#[allow(clippy::too_many_arguments)]
pub fn propose_next_sample<R: RngCore>(
    post: &GpPosterior,
    config: &AcquisitionConfig,
    inc: &Incumbent,
    bounds: &Bounds,
    method: Method,
    n_restarts: usize,
    settings: &OptimizerSettings,
    rng: &mut R,
) -> Result<Proposal> {
    let clock = Instant::now();
    if n_restarts == 0 {
        return Err(Error::contract("n_restarts must be at least 1"));
    }
    Error::check_dim(post.data().dim(), bounds.dim())?;

    let axes: Vec<Uniform<f64>> =
        bounds.lower().iter().zip(bounds.upper()).map(|(lo, hi)| Uniform::new_inclusive(*lo, *hi)).collect();
    let starts: Vec<Vec<f64>> = (0..n_restarts).map(|_| axes.iter().map(|u| u.sample(rng)).collect()).collect();

    let objective = |x: &[f64]| config.value(post, x, inc).unwrap_or(f64::NAN);
    let gradient = |x: &[f64]| config.gradient_within(post, x, inc, bounds).unwrap_or_else(|_| vec![f64::NAN; x.len()]);

    let mut best: Option<OptimizerReport> = None;
    let (mut n_f, mut n_g, mut iterations) = (0, 0, 0);
    let mut last_err = None;
    for start in &starts {
        let run = match method {
            Method::Lbfgs => lbfgs_maximize(objective, gradient, start, bounds, settings),
            Method::Tnc => tnc_maximize(objective, gradient, start, bounds, settings),
        };
        match run {
            Ok(r) => {
                n_f += r.n_function_evals;
                n_g += r.n_gradient_evals;
                iterations += r.iterations;
                if best.as_ref().is_none_or(|b| r.value_best > b.value_best) {
                    best = Some(r);
                }
            }
            Err(e) => last_err = Some(e),
        }
    }

    let Some(best) = best else {
        return Err(Error::Proposal { restarts: n_restarts, last: Box::new(last_err.expect("every restart failed")) });
    };
    let report = OptimizerReport {
        x_best: best.x_best.clone(),
        value_best: best.value_best,
        n_function_evals: n_f,
        n_gradient_evals: n_g,
        iterations,
        elapsed: clock.elapsed().as_secs_f64(),
        restarts_run: n_restarts,
        converged: best.converged,
    };
    Ok(Proposal { x_next: best.x_best, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acquisition::AcquisitionKind;
    use crate::gp::Dataset;
    use crate::kernel::KernelParams;
    use rand_chacha::ChaCha20Rng;
    use rand_core::SeedableRng;

    #[test]
    fn constant_surface_returns_in_bounds_point() {
        let post = GpPosterior::fit(Dataset::new(1, 0.0).unwrap(), KernelParams::default()).unwrap();
        let inc = Incumbent { x_plus: vec![0.0], f_plus: 0.0 };
        let cfg = AcquisitionConfig::default();
        let bounds = Bounds::interval(-2.0, 2.0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for method in Method::ALL {
            let p = propose_next_sample(&post, &cfg, &inc, &bounds, method, 5, &Default::default(), &mut rng).unwrap();
            assert!(bounds.contains(&p.x_next));
            let constant = cfg.value(&post, &[0.0], &inc).unwrap();
            assert!((p.report.value_best - constant).abs() < 1e-15);
            assert_eq!(p.report.restarts_run, 5);
        }
    }

    #[test]
    fn same_seed_same_proposal() {
        let data = Dataset::from_observations(vec![vec![-0.9], vec![0.9]], vec![-2.6, -0.3], 0.04).unwrap();
        let post = GpPosterior::fit(data.clone(), KernelParams::default()).unwrap();
        let inc = Incumbent::from_dataset(&data).unwrap();
        let bounds = Bounds::interval(-2.0, 2.0).unwrap();
        for kind in AcquisitionKind::ALL {
            let cfg = AcquisitionConfig::new(kind, 0.01).unwrap();
            for method in Method::ALL {
                let run = |seed| {
                    let mut rng = ChaCha20Rng::seed_from_u64(seed);
                    propose_next_sample(&post, &cfg, &inc, &bounds, method, 25, &Default::default(), &mut rng).unwrap()
                };
                let (a, b) = (run(11), run(11));
                assert_eq!(a.x_next, b.x_next);
                assert_eq!(a.report.value_best.to_bits(), b.report.value_best.to_bits());
            }
        }
    }

    #[test]
    fn zero_restarts_rejected() {
        let post = GpPosterior::fit(Dataset::new(1, 0.0).unwrap(), KernelParams::default()).unwrap();
        let inc = Incumbent { x_plus: vec![0.0], f_plus: 0.0 };
        let bounds = Bounds::interval(-2.0, 2.0).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        let r = propose_next_sample(
            &post,
            &Default::default(),
            &inc,
            &bounds,
            Method::Lbfgs,
            0,
            &Default::default(),
            &mut rng,
        );
        assert!(r.is_err());
    }
}

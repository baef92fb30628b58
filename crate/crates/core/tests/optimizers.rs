//! Inner optimizers against dense-grid oracles.

use std::cell::RefCell;

use bayesopt::objective::{grid_argmax, objective_unchecked};
use bayesopt::optimize::{lbfgs_maximize, propose_next_sample, tnc_maximize};
use bayesopt::{
    AcquisitionConfig, AcquisitionKind, Bounds, Dataset, GpPosterior, Incumbent, KernelParams, Method,
    OptimizerSettings,
};
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

fn fd_objective(x: &[f64]) -> Vec<f64> {
    let h = 1e-6 * x[0].abs().max(1.0);
    vec![(objective_unchecked(x[0] + h) - objective_unchecked(x[0] - h)) / (2.0 * h)]
}

/// Maximum of the objective over the basin of attraction (for ascent) that
/// contains `start`, found on a 10⁵-point grid.
fn basin_max(start: f64) -> f64 {
    let n = 100_000;
    let (lo, hi) = (-2.0, 2.0);
    let step = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * step).collect();
    let fs: Vec<f64> = xs.iter().map(|x| objective_unchecked(*x)).collect();
    let mut i = ((start - lo) / step).round() as usize;
    loop {
        let left = if i > 0 { fs[i - 1] } else { f64::MIN };
        let right = if i + 1 < n { fs[i + 1] } else { f64::MIN };
        if right > fs[i] && right >= left {
            i += 1;
        } else if left > fs[i] {
            i -= 1;
        } else {
            return fs[i];
        }
    }
}

#[test]
fn both_methods_find_the_basin_maximum() {
    let b = Bounds::interval(-2.0, 2.0).unwrap();
    let target = basin_max(0.5);
    for (name, r) in [
        (
            "lbfgs",
            lbfgs_maximize(|x| objective_unchecked(x[0]), fd_objective, &[0.5], &b, &OptimizerSettings::default()),
        ),
        ("tnc", tnc_maximize(|x| objective_unchecked(x[0]), fd_objective, &[0.5], &b, &OptimizerSettings::default())),
    ] {
        let r = r.unwrap();
        assert!(r.value_best >= target - 1e-6, "{name}: {} vs grid {target}", r.value_best);
        assert!((r.value_best - objective_unchecked(r.x_best[0])).abs() <= 1e-12);
    }
}

#[test]
fn every_evaluation_stays_in_bounds_and_improves_on_start() {
    let b = Bounds::interval(-1.0, 1.5).unwrap();
    for start in [-1.0, -0.3, 0.2, 0.9, 1.5] {
        for method in Method::ALL {
            let seen = RefCell::new(Vec::new());
            let f = |x: &[f64]| {
                seen.borrow_mut().push(x[0]);
                objective_unchecked(x[0])
            };
            let g = |x: &[f64]| {
                let h = 1e-6;
                let (hi, lo) = ((x[0] + h).min(1.5), (x[0] - h).max(-1.0));
                vec![(objective_unchecked(hi) - objective_unchecked(lo)) / (hi - lo)]
            };
            let r = match method {
                Method::Lbfgs => lbfgs_maximize(f, g, &[start], &b, &OptimizerSettings::default()),
                Method::Tnc => tnc_maximize(f, g, &[start], &b, &OptimizerSettings::default()),
            }
            .unwrap();
            assert!(r.value_best >= objective_unchecked(start) - 1e-12);
            assert!(b.contains(&r.x_best));
            assert!(seen.borrow().iter().all(|x| (-1.0..=1.5).contains(x)), "{method} from {start}");
        }
    }
}

#[test]
fn single_peak_acquisition_recovered() {
    // one noise-free observation far below the prior mean: EI has a single
    // interior peak in [-2, 2] away from the data
    let data = Dataset::from_observations(vec![vec![0.0]], vec![-1.0], 0.0).unwrap();
    let post = GpPosterior::fit(data.clone(), KernelParams::default()).unwrap();
    let inc = Incumbent::from_dataset(&data).unwrap();
    let bounds = Bounds::interval(-0.2, 2.0).unwrap();
    let cfg = AcquisitionConfig::new(AcquisitionKind::Ei, 0.01).unwrap();
    let acq = |x: f64| cfg.value(&post, &[x], &inc).unwrap();
    let (x_star, _) = grid_argmax(acq, -0.2, 2.0, 100_000).unwrap();
    for method in Method::ALL {
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let p = propose_next_sample(&post, &cfg, &inc, &bounds, method, 25, &OptimizerSettings::default(), &mut rng)
            .unwrap();
        assert!((p.x_next[0] - x_star).abs() <= 1e-3, "{method}: {} vs {x_star}", p.x_next[0]);
    }
}

//! GP posterior against a dense-inverse computation of the textbook
//! formulas, done with nalgebra.

use bayesopt::kernel::{matern52, KernelParams};
use bayesopt::{Dataset, GpPosterior};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn dense_posterior(points: &[f64], ys: &[f64], noise: f64, jitter: f64, x: f64) -> (f64, f64) {
    let p = KernelParams::default();
    let n = points.len();
    let k = |a: f64, b: f64| matern52(&[a], &[b], &p).unwrap();
    let gram = DMatrix::from_fn(n, n, |i, j| k(points[i], points[j]) + if i == j { noise + jitter } else { 0.0 });
    let inv = gram.try_inverse().expect("invertible");
    let ks = DVector::from_fn(n, |i, _| k(x, points[i]));
    let y = DVector::from_column_slice(ys);
    let mu = ks.dot(&(&inv * y));
    let var = k(x, x) - ks.dot(&(&inv * &ks));
    (mu, var.max(0.0).sqrt())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn matches_dense_inverse(
        xs in proptest::collection::vec(-2.0f64..2.0, 1..=4),
        ys in proptest::collection::vec(-3.0f64..3.0, 4),
        noise in prop_oneof![Just(0.0), 0.0f64..0.1],
        queries in proptest::collection::vec(-2.5f64..2.5, 8),
    ) {
        // keep training points apart so the dense inverse stays well conditioned
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 0.05);
        let ys = &ys[..xs.len()];
        let data = Dataset::from_observations(xs.iter().map(|x| vec![*x]).collect(), ys.to_vec(), noise).unwrap();
        let post = GpPosterior::fit(data, KernelParams::default()).unwrap();
        for q in queries.iter().chain(&xs) {
            let (mu, sigma) = post.predict(&[*q]).unwrap();
            let (mu_ref, sigma_ref) = dense_posterior(&xs, ys, noise, post.jitter(), *q);
            prop_assert!((mu - mu_ref).abs() <= 1e-8, "mu {} vs {}", mu, mu_ref);
            prop_assert!((sigma * sigma - sigma_ref * sigma_ref).abs() <= 1e-8);
        }
        if noise == 0.0 {
            for (x, y) in xs.iter().zip(ys) {
                prop_assert!((post.predict(&[*x]).unwrap().0 - y).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn sigma_never_nan_or_negative(
        xs in proptest::collection::vec(-2.0f64..2.0, 1..=10),
        ys in proptest::collection::vec(-3.0f64..3.0, 10),
        noise in 0.0f64..0.1,
        queries in proptest::collection::vec(-4.0f64..4.0, 50),
    ) {
        let ys = &ys[..xs.len()];
        let data = Dataset::from_observations(xs.iter().map(|x| vec![*x]).collect(), ys.to_vec(), noise).unwrap();
        let post = GpPosterior::fit(data, KernelParams::default()).unwrap();
        for q in &queries {
            let (mu, sigma) = post.predict(&[*q]).unwrap();
            prop_assert!(mu.is_finite());
            prop_assert!(sigma >= 0.0 && !sigma.is_nan());
        }
    }

    #[test]
    fn training_points_less_uncertain_than_far_points(
        xs in proptest::collection::vec(-2.0f64..2.0, 1..=6),
        ys in proptest::collection::vec(-3.0f64..3.0, 6),
    ) {
        let ys = &ys[..xs.len()];
        let data = Dataset::from_observations(xs.iter().map(|x| vec![*x]).collect(), ys.to_vec(), 0.0).unwrap();
        let post = GpPosterior::fit(data, KernelParams::default()).unwrap();
        // 3 lengthscales beyond the outermost training point
        let far = xs.iter().cloned().fold(f64::MIN, f64::max) + 3.0;
        let (_, s_far) = post.predict(&[far]).unwrap();
        for x in &xs {
            prop_assert!(post.predict(&[*x]).unwrap().1 <= s_far);
        }
    }
}

//! Limited-memory BFGS with projected-gradient bound handling.

use std::collections::VecDeque;

use web_time::Instant;

use crate::error::Result;
use crate::optimize::line_search::projected_wolfe;
use crate::optimize::{check_start, inf_norm, Bounds, OptimizerReport, OptimizerSettings, Problem};
use crate::stats::dot;

struct Pair {
    s: Vec<f64>,
    y: Vec<f64>,
    rho: f64,
}

/// Applies the implicit inverse-Hessian approximation to `grad` and returns
/// the quasi-Newton descent direction `-H·grad`.
fn two_loop(grad: &[f64], history: &VecDeque<Pair>) -> Vec<f64> {
    let mut q = grad.to_vec();
    let mut alphas = Vec::with_capacity(history.len());
    for p in history.iter().rev() {
        let a = p.rho * dot(&p.s, &q);
        q.iter_mut().zip(&p.y).for_each(|(qi, yi)| *qi -= a * yi);
        alphas.push(a);
    }
    let gamma = history.back().map_or(1.0, |p| dot(&p.s, &p.y) / dot(&p.y, &p.y));
    q.iter_mut().for_each(|v| *v *= gamma);
    for (p, a) in history.iter().zip(alphas.iter().rev()) {
        let b = p.rho * dot(&p.y, &q);
        q.iter_mut().zip(&p.s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// Maximizes `objective` over `bounds` starting from `start`.
///
/// `gradient` must return the gradient of `objective` (not of its negation).
pub fn lbfgs_maximize<F, G>(
    objective: F,
    gradient: G,
    start: &[f64],
    bounds: &Bounds,
    settings: &OptimizerSettings,
) -> Result<OptimizerReport>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let clock = Instant::now();
    check_start(start, bounds, settings)?;
    let mut problem = Problem::new(objective, gradient);
    let mut x = start.to_vec();
    let mut f = problem.value(&x)?;
    let mut g = problem.gradient(&x)?;
    let mut history: VecDeque<Pair> = VecDeque::with_capacity(settings.memory);
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let pg = bounds.project_gradient(&x, &g);
        if inf_norm(&pg) <= settings.gradient_tolerance {
            converged = true;
            break;
        }
        if iterations >= settings.max_iterations {
            break;
        }
        let mut d = two_loop(&pg, &history);
        bounds.mask_direction(&x, &mut d);
        if !(dot(&d, &pg) < 0.0) {
            history.clear();
            d = pg.iter().map(|v| -v).collect();
        }
        let Some(step) = projected_wolfe(&mut problem, bounds, &x, f, &g, &d, settings)? else {
            if history.is_empty() {
                break;
            }
            // stale curvature pairs; retry from steepest descent
            history.clear();
            continue;
        };
        let s: Vec<f64> = step.x.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = step.g.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-10 * dot(&s, &s).sqrt() * dot(&y, &y).sqrt() {
            if history.len() == settings.memory {
                history.pop_front();
            }
            history.push_back(Pair { s, y, rho: 1.0 / sy });
        }
        x = step.x;
        f = step.f;
        g = step.g;
        iterations += 1;
    }

    Ok(OptimizerReport {
        x_best: x,
        value_best: -f,
        n_function_evals: problem.n_f,
        n_gradient_evals: problem.n_g,
        iterations,
        elapsed: clock.elapsed().as_secs_f64(),
        restarts_run: 1,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd(f: impl Fn(f64) -> f64) -> impl Fn(&[f64]) -> Vec<f64> {
        move |x: &[f64]| {
            let h = 1e-6 * x[0].abs().max(1.0);
            vec![(f(x[0] + h) - f(x[0] - h)) / (2.0 * h)]
        }
    }

    #[test]
    fn interior_quadratic() {
        let b = Bounds::interval(0.0, 10.0).unwrap();
        let r = lbfgs_maximize(
            |x| -(x[0] - 3.0).powi(2),
            |x| vec![-2.0 * (x[0] - 3.0)],
            &[0.0],
            &b,
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert!((r.x_best[0] - 3.0).abs() < 1e-6);
        assert!(r.converged);
    }

    #[test]
    fn active_upper_bound() {
        let b = Bounds::interval(0.0, 1.0).unwrap();
        let r = lbfgs_maximize(|x| x[0], |_| vec![1.0], &[0.5], &b, &OptimizerSettings::default()).unwrap();
        assert_eq!(r.x_best, vec![1.0]);
        assert_eq!(r.value_best, 1.0);
        assert!(r.converged);
    }

    #[test]
    fn rosenbrock_two_d() {
        let b = Bounds::new(vec![-2.0, -2.0], vec![2.0, 2.0]).unwrap();
        let f = |x: &[f64]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let g = |x: &[f64]| {
            vec![-(-2.0 * (1.0 - x[0]) - 400.0 * x[0] * (x[1] - x[0] * x[0])), -(200.0 * (x[1] - x[0] * x[0]))]
        };
        let r = lbfgs_maximize(f, g, &[-1.2, 1.0], &b, &OptimizerSettings::default()).unwrap();
        assert!((r.x_best[0] - 1.0).abs() < 1e-5 && (r.x_best[1] - 1.0).abs() < 1e-5, "{r:?}");
    }

    #[test]
    fn finite_difference_gradient_on_objective() {
        let obj = |x: f64| -(3.0 * x * x).sin() - x * x + 1.3 * x;
        let b = Bounds::interval(-2.0, 2.0).unwrap();
        let r = lbfgs_maximize(|x| obj(x[0]), fd(obj), &[0.5], &b, &OptimizerSettings::default()).unwrap();
        assert!(r.value_best >= obj(0.5));
        assert!((r.value_best - obj(r.x_best[0])).abs() <= 1e-12);
    }

    #[test]
    fn non_finite_objective_is_reported() {
        let b = Bounds::interval(0.0, 1.0).unwrap();
        let err = lbfgs_maximize(|_| f64::NAN, |_| vec![0.0], &[0.5], &b, &Default::default());
        assert!(matches!(err, Err(crate::Error::Numeric { .. })));
    }

    #[test]
    fn start_outside_bounds_rejected() {
        let b = Bounds::interval(0.0, 1.0).unwrap();
        assert!(lbfgs_maximize(|x| x[0], |_| vec![1.0], &[2.0], &b, &Default::default()).is_err());
    }
}

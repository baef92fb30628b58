//! Truncated Newton: each search direction is an approximate Newton step
//! from a capped conjugate-gradient solve that only needs Hessian-vector
//! products, formed by differencing the gradient.

use web_time::Instant;

use crate::error::Result;
use crate::optimize::line_search::projected_wolfe;
use crate::optimize::{check_start, inf_norm, Bounds, OptimizerReport, OptimizerSettings, Problem};
use crate::stats::dot;

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Forward difference `(∇f(x + h·v) − ∇f(x)) / h` with displacement
/// `‖h·v‖ = 1e-7·(1 + ‖x‖)`. Flips to a backward difference when the forward
/// point would leave the box.
fn hessian_vector<F, G>(
    problem: &mut Problem<F, G>,
    bounds: &Bounds,
    x: &[f64],
    g: &[f64],
    v: &[f64],
) -> Result<Vec<f64>>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let vn = norm(v);
    if vn == 0.0 {
        return Ok(vec![0.0; v.len()]);
    }
    let mut h = 1e-7 * (1.0 + norm(x)) / vn;
    let shift = |h: f64| x.iter().zip(v).map(|(a, b)| a + h * b).collect::<Vec<f64>>();
    let mut xp = shift(h);
    if !bounds.contains(&xp) {
        h = -h;
        xp = shift(h);
        bounds.clamp(&mut xp);
    }
    let gp = problem.gradient(&xp)?;
    Ok(gp.iter().zip(g).map(|(a, b)| (a - b) / h).collect())
}

/// Maximizes `objective` over `bounds` starting from `start`.
///
/// `gradient` must return the gradient of `objective` (not of its negation).
pub fn tnc_maximize<F, G>(
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
    let cg_cap = settings.cg_cap(start.len());
    let mut x = start.to_vec();
    let mut f = problem.value(&x)?;
    let mut g = problem.gradient(&x)?;
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
        let free: Vec<bool> = pg.iter().zip(&g).map(|(p, gi)| *p != 0.0 || *gi == 0.0).collect();
        let mask = |v: &mut Vec<f64>| {
            v.iter_mut().zip(&free).filter(|(_, f)| !**f).for_each(|(x, _)| *x = 0.0);
        };

        // CG on H·p = −g over the free variables
        let mut p = vec![0.0; x.len()];
        let mut r: Vec<f64> = pg.iter().map(|v| -v).collect();
        let mut d = r.clone();
        let mut rr = dot(&r, &r);
        for k in 0..cg_cap {
            let mut hd = hessian_vector(&mut problem, bounds, &x, &g, &d)?;
            mask(&mut hd);
            let curvature = dot(&d, &hd);
            if curvature <= 1e-14 * dot(&d, &d) {
                // negative curvature: keep what we have, or fall back to steepest descent
                if k == 0 {
                    p = d;
                }
                break;
            }
            let a = rr / curvature;
            p.iter_mut().zip(&d).for_each(|(pi, di)| *pi += a * di);
            r.iter_mut().zip(&hd).for_each(|(ri, hi)| *ri -= a * hi);
            let rr_next = dot(&r, &r);
            if rr_next.sqrt() <= settings.cg_residual_tolerance {
                break;
            }
            let beta = rr_next / rr;
            d = r.iter().zip(&d).map(|(ri, di)| ri + beta * di).collect();
            rr = rr_next;
        }

        bounds.mask_direction(&x, &mut p);
        if !(dot(&p, &pg) < 0.0) {
            p = pg.iter().map(|v| -v).collect();
        }
        let Some(step) = projected_wolfe(&mut problem, bounds, &x, f, &g, &p, settings)? else {
            break;
        };
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

    #[test]
    fn interior_quadratic_from_far_start() {
        let b = Bounds::interval(0.0, 10.0).unwrap();
        let r = tnc_maximize(
            |x| -(x[0] - 3.0).powi(2),
            |x| vec![-2.0 * (x[0] - 3.0)],
            &[9.0],
            &b,
            &OptimizerSettings::default(),
        )
        .unwrap();
        assert!((r.x_best[0] - 3.0).abs() < 1e-6, "{r:?}");
    }

    #[test]
    fn two_d_quadratic_in_few_newton_steps() {
        // -(x-c)ᵀ A (x-c) with A = [[2, 0.5], [0.5, 1]], c = (1, 2)
        let c = [1.0, 2.0];
        let f = move |x: &[f64]| {
            let (u, v) = (x[0] - c[0], x[1] - c[1]);
            -(2.0 * u * u + u * v + v * v)
        };
        let g = move |x: &[f64]| {
            let (u, v) = (x[0] - c[0], x[1] - c[1]);
            vec![-(4.0 * u + v), -(u + 2.0 * v)]
        };
        let b = Bounds::new(vec![-5.0, -5.0], vec![5.0, 5.0]).unwrap();
        let r = tnc_maximize(f, g, &[-3.0, 4.0], &b, &OptimizerSettings::default()).unwrap();
        assert!((r.x_best[0] - 1.0).abs() < 1e-6 && (r.x_best[1] - 2.0).abs() < 1e-6, "{r:?}");
        assert!(r.iterations <= 3, "{r:?}");
    }

    #[test]
    fn stationary_start_converges_immediately() {
        let b = Bounds::interval(-1.0, 1.0).unwrap();
        let r = tnc_maximize(|x| -x[0] * x[0], |x| vec![-2.0 * x[0]], &[0.0], &b, &Default::default()).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 0);
        assert_eq!(r.x_best, vec![0.0]);
    }

    #[test]
    fn negative_curvature_still_ascends() {
        // start at a local minimum of the maximized function, slightly offset
        let b = Bounds::interval(-2.0, 2.0).unwrap();
        let r = tnc_maximize(
            |x| x[0] * x[0] - 0.25 * x[0].powi(4),
            |x| vec![2.0 * x[0] - x[0].powi(3)],
            &[0.1],
            &b,
            &Default::default(),
        )
        .unwrap();
        assert!((r.x_best[0] - 2f64.sqrt()).abs() < 1e-6, "{r:?}");
    }
}

use crate::error::Result;
use crate::optimize::{Bounds, OptimizerSettings, Problem};
use crate::stats::dot;

pub(crate) struct Step {
    pub x: Vec<f64>,
    pub f: f64,
    pub g: Vec<f64>,
}

/// Bracketing line search along the projected path `P(x + α·d)`.
///
/// Sufficient decrease is measured against the actual (clamped) displacement.
/// A point is accepted as soon as it satisfies the strong-Wolfe curvature
/// condition or hits a bound. If the trial budget runs out, the best point
/// that satisfied sufficient decrease is returned; `None` means no decrease
/// was found at all.
pub(crate) fn projected_wolfe<F, G>(
    problem: &mut Problem<F, G>,
    bounds: &Bounds,
    x: &[f64],
    f: f64,
    g: &[f64],
    d: &[f64],
    settings: &OptimizerSettings,
) -> Result<Option<Step>>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let gd = dot(g, d);
    let (c1, c2) = (settings.line_search_c1, settings.line_search_c2);
    let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
    let mut alpha = 1.0;
    let mut fallback: Option<Step> = None;

    for _ in 0..settings.line_search_max_steps {
        let raw: Vec<f64> = x.iter().zip(d).map(|(xi, di)| xi + alpha * di).collect();
        let mut xt = raw.clone();
        bounds.clamp(&mut xt);
        let step: Vec<f64> = xt.iter().zip(x).map(|(a, b)| a - b).collect();
        if step.iter().all(|s| *s == 0.0) {
            break;
        }
        let clamped = xt != raw;
        let ft = problem.value(&xt)?;
        let decrease = dot(g, &step);
        if decrease >= 0.0 || ft > f + c1 * decrease || ft >= f {
            hi = alpha;
            alpha = 0.5 * (lo + hi);
            continue;
        }
        let gt = problem.gradient(&xt)?;
        let slope = dot(&gt, d);
        if clamped || slope.abs() <= c2 * gd.abs() {
            return Ok(Some(Step { x: xt, f: ft, g: gt }));
        }
        if fallback.as_ref().is_none_or(|b| ft < b.f) {
            fallback = Some(Step { x: xt, f: ft, g: gt });
        }
        if slope > 0.0 {
            hi = alpha;
        } else {
            lo = alpha;
        }
        alpha = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * alpha };
    }
    Ok(fallback)
}

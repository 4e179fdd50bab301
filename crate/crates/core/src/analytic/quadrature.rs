//! Adaptive Simpson quadrature.

use crate::error::{Error, Result};

/// Integrates `f` over `[a, b]` to absolute tolerance `tol`, refining at most
/// `max_depth` times along any branch.
pub fn adaptive_simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_depth: u32) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    let mut worst = Failure::default();
    let value = refine(&mut f, a, b, fa, fm, fb, whole, tol, max_depth, 0, &mut worst);
    match worst.interval {
        Some((lower, upper)) => Err(Error::Quadrature {
            lower,
            upper,
            estimate: worst.estimate,
            tolerance: worst.tolerance,
        }),
        None => Ok(value),
    }
}

/// Integrates over consecutive segments `points[k]..points[k+1]`, sharing the
/// tolerance in proportion to segment length. Breakpoints may be jumps: each
/// segment sees its one-sided limits there.
pub fn integrate_piecewise<F: FnMut(f64) -> f64>(mut f: F, points: &[f64], tol: f64, max_depth: u32) -> Result<f64> {
    let span = match (points.first(), points.last()) {
        (Some(lo), Some(hi)) if hi > lo => hi - lo,
        _ => return Ok(0.0),
    };
    let mut total = 0.0;
    for seg in points.windows(2) {
        let len = seg[1] - seg[0];
        if len <= 0.0 {
            continue;
        }
        let (lo, hi) = (seg[0] + 1e-13 * len, seg[1] - 1e-13 * len);
        total += adaptive_simpson(|x: f64| f(x.clamp(lo, hi)), seg[0], seg[1], tol * len / span, max_depth)?;
    }
    Ok(total)
}

#[derive(Default)]
struct Failure {
    interval: Option<(f64, f64)>,
    estimate: f64,
    tolerance: f64,
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

/// Levels always subdivided before a local estimate may be accepted, so a
/// coincidentally flat first panel is never trusted.
const MIN_LEVEL: u32 = 3;

#[allow(clippy::too_many_arguments)]
fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth_left: u32,
    level: u32,
    worst: &mut Failure,
) -> f64 {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    let converged = delta.abs() <= 15.0 * tol;
    if (converged && level >= MIN_LEVEL) || depth_left == 0 {
        if !converged && delta.abs() / 15.0 > worst.estimate {
            *worst = Failure {
                interval: Some((a, b)),
                estimate: delta.abs() / 15.0,
                tolerance: tol,
            };
        }
        return left + right + delta / 15.0;
    }
    refine(f, a, m, fa, flm, fm, left, 0.5 * tol, depth_left - 1, level + 1, worst)
        + refine(f, m, b, fm, frm, fb, right, 0.5 * tol, depth_left - 1, level + 1, worst)
}

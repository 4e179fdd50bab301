//! Time-resolved and integrated signal-signal coincidence rates.

use std::cell::Cell;

use super::params::{ExperimentConfig, PolarizationConfig};
use super::quadrature::integrate_piecewise;
use crate::error::{Error, Result};

/// Relative tolerance of the double integral, in units of the peak density
/// times the window area.
pub const QUADRATURE_RELATIVE_TOLERANCE: f64 = 1e-9;
const MAX_DEPTH: u32 = 48;

/// Per-site weights `E² eps s²`, then `T` and `R`.
fn weights(config: &ExperimentConfig) -> ([f64; 2], f64, f64) {
    let w = [0, 1].map(|k| config.sites[k].signal_weight() * config.sites[k].s2());
    (w, config.transmittance(), config.reflectance)
}

/// First (two-source) term of `G∥(t, t + tau)` without the `E² s²` weights:
/// `|T phi_A(t+tau) phi_B(t) - R phi_B(t+tau) phi_A(t)|²`.
pub fn hom_term(config: &ExperimentConfig, t: f64, tau: f64) -> f64 {
    let (a, b) = (&config.sites[0].wavepacket, &config.sites[1].wavepacket);
    let u = t + tau;
    let amp = a.amplitude(u) * b.amplitude(t) * config.transmittance() - b.amplitude(u) * a.amplitude(t) * config.reflectance;
    amp.norm_sqr()
}

fn multiphoton_term(config: &ExperimentConfig, t: f64, tau: f64) -> f64 {
    let ([wa, wb], tr, r) = weights(config);
    let u = t + tau;
    let (a, b) = (&config.sites[0].wavepacket, &config.sites[1].wavepacket);
    let pa = (a.amplitude(u) * a.amplitude(t)).norm_sqr();
    let pb = (b.amplitude(u) * b.amplitude(t)).norm_sqr();
    2.0 * r * tr * (wa * wa * pa + wb * wb * pb)
}

/// `G∥(12)(t, t + tau)`: interfering two-source term plus the multiphoton
/// term of each source.
pub fn g12_parallel(config: &ExperimentConfig, t: f64, tau: f64) -> f64 {
    let ([wa, wb], _, _) = weights(config);
    wa * wb * hom_term(config, t, tau) + multiphoton_term(config, t, tau)
}

/// `G⊥(12)(t, t + tau)`: as [`g12_parallel`] with the cross term dropped.
pub fn g12_perpendicular(config: &ExperimentConfig, t: f64, tau: f64) -> f64 {
    let ([wa, wb], tr, r) = weights(config);
    let (a, b) = (&config.sites[0].wavepacket, &config.sites[1].wavepacket);
    let u = t + tau;
    let direct = tr * tr * (a.amplitude(u) * b.amplitude(t)).norm_sqr() + r * r * (b.amplitude(u) * a.amplitude(t)).norm_sqr();
    wa * wb * direct + multiphoton_term(config, t, tau)
}

/// Integration grid: the common window of both wavepackets, split at every
/// kink or jump.
fn grid(config: &ExperimentConfig) -> Vec<f64> {
    let (a, b) = (&config.sites[0].wavepacket, &config.sites[1].wavepacket);
    let (la, ha) = a.support();
    let (lb, hb) = b.support();
    let (lo, hi) = (la.min(lb), ha.max(hb));
    let mut points = vec![lo, hi];
    points.extend(a.breakpoints().into_iter().chain(b.breakpoints()).filter(|&p| p > lo && p < hi));
    points.sort_by(f64::total_cmp);
    points.dedup();
    points
}

fn integrate_density<F: Fn(f64, f64) -> f64>(config: &ExperimentConfig, density: F) -> Result<f64> {
    let points = grid(config);
    let span = points[points.len() - 1] - points[0];
    let ([wa, wb], _, _) = weights(config);
    let peak_a = config.sites[0].wavepacket.peak_intensity();
    let peak_b = config.sites[1].wavepacket.peak_intensity();
    let peak = (wa + wb).powi(2) * peak_a.max(peak_b).powi(2);
    if peak == 0.0 {
        return Ok(0.0);
    }
    let tol = QUADRATURE_RELATIVE_TOLERANCE * peak * span * span;
    let failure = Cell::new(None);
    // Integrate over (t, u = t + tau); the Jacobian is 1.
    let outer = integrate_piecewise(
        |t| {
            let inner = integrate_piecewise(|u| density(t, u - t), &points, 0.1 * tol / span, MAX_DEPTH);
            match inner {
                Ok(v) => v,
                Err(e) => {
                    if failure.take().is_none() {
                        failure.set(Some(e));
                    }
                    0.0
                }
            }
        },
        &points,
        tol,
        MAX_DEPTH,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(outer),
    }
}

/// `∫∫ dt dtau G(12)` for the requested polarization configuration, by
/// adaptive quadrature.
pub fn integrated_two_fold(config: &ExperimentConfig, polarization: PolarizationConfig) -> Result<f64> {
    match polarization {
        PolarizationConfig::Parallel => integrate_density(config, |t, tau| g12_parallel(config, t, tau)),
        PolarizationConfig::Perpendicular => integrate_density(config, |t, tau| g12_perpendicular(config, t, tau)),
    }
}

/// `∫∫G∥ / ∫∫G⊥` by quadrature.
pub fn integrated_two_fold_ratio(config: &ExperimentConfig) -> Result<f64> {
    let par = integrated_two_fold(config, PolarizationConfig::Parallel)?;
    let perp = integrated_two_fold(config, PolarizationConfig::Perpendicular)?;
    if perp == 0.0 {
        return Err(Error::domain("two-fold rate vanishes: both sources are off"));
    }
    Ok(par / perp)
}

/// Integrated two-fold rate for identical wavepackets.
pub fn closed_form_two_fold(config: &ExperimentConfig, polarization: PolarizationConfig) -> Result<f64> {
    if !config.identical_wavepackets() {
        return Err(Error::MismatchedWavepackets);
    }
    let ([wa, wb], tr, r) = weights(config);
    let direct = match polarization {
        PolarizationConfig::Parallel => (tr - r).powi(2),
        PolarizationConfig::Perpendicular => tr * tr + r * r,
    };
    Ok(direct * wa * wb + 2.0 * r * tr * (wa * wa + wb * wb))
}

pub fn closed_form_two_fold_ratio(config: &ExperimentConfig) -> Result<f64> {
    let par = closed_form_two_fold(config, PolarizationConfig::Parallel)?;
    let perp = closed_form_two_fold(config, PolarizationConfig::Perpendicular)?;
    if perp == 0.0 {
        return Err(Error::domain("two-fold rate vanishes: both sources are off"));
    }
    Ok(par / perp)
}

//! Four-fold (two signals, two idlers) coincidence rates.

use super::params::{ExperimentConfig, PolarizationConfig};
use crate::error::{Error, Result};

/// `R(4)` for either polarization setting: the rate scaled by the signal
/// weights `E² eps` of each site and the idler efficiencies.
///
/// With equal weights `g` this is `g² eta_A eta_B s_A² s_B² {c (1+2s_A²)(1+2s_B²)
/// + 2RT(3s_A⁴ + 3s_B⁴ + 2s_A² + 2s_B²)}` with `c = (R-T)²` or `R² + T²`.
pub fn four_fold(config: &ExperimentConfig, polarization: PolarizationConfig) -> Result<f64> {
    if !config.identical_wavepackets() {
        return Err(Error::MismatchedWavepackets);
    }
    let (r, t) = (config.reflectance, config.transmittance());
    let [a, b] = &config.sites;
    let (sa, sb) = (a.s2(), b.s2());
    let (ga, gb) = (a.signal_weight(), b.signal_weight());
    let idlers = a.idler_efficiency(config.delta_t) * b.idler_efficiency(config.delta_t);
    let direct = match polarization {
        PolarizationConfig::Parallel => (r - t).powi(2),
        PolarizationConfig::Perpendicular => r * r + t * t,
    };
    let one_each = ga * gb * direct * (1.0 + 2.0 * sa) * (1.0 + 2.0 * sb);
    let same_site = 2.0 * r * t * (ga * ga * (3.0 * sa * sa + 2.0 * sa) + gb * gb * (3.0 * sb * sb + 2.0 * sb));
    Ok(idlers * sa * sb * (one_each + same_site))
}

pub fn four_fold_parallel(config: &ExperimentConfig) -> Result<f64> {
    four_fold(config, PolarizationConfig::Parallel)
}

pub fn four_fold_perpendicular(config: &ExperimentConfig) -> Result<f64> {
    four_fold(config, PolarizationConfig::Perpendicular)
}

/// `R∥(4) / R⊥(4)`.
pub fn four_fold_ratio(config: &ExperimentConfig) -> Result<f64> {
    let perp = four_fold_perpendicular(config)?;
    if perp == 0.0 {
        return Err(Error::domain("four-fold rate vanishes: a source or detector is off"));
    }
    Ok(four_fold_parallel(config)? / perp)
}

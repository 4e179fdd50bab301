//! Closed-form coincidence rates, visibilities and the blocked-source
//! benchmark.

pub mod benchmark;
pub mod four_fold;
pub mod params;
pub mod quadrature;
pub mod two_fold;
pub mod wavepacket;

pub use benchmark::{analytic_w_perp, w_perp_benchmark, SiteClickStats};
pub use four_fold::{four_fold, four_fold_parallel, four_fold_perpendicular, four_fold_ratio};
pub use params::{EnsembleParams, ExperimentConfig, PolarizationConfig, Site};
pub use two_fold::{
    closed_form_two_fold, closed_form_two_fold_ratio, g12_parallel, g12_perpendicular, hom_term, integrated_two_fold,
    integrated_two_fold_ratio,
};
pub use wavepacket::{SampledProfile, Wavepacket};

use crate::error::Result;

/// Probability of a signal detection per trial, `eps_A s_A² + eps_B s_B²`.
pub fn p1(config: &ExperimentConfig) -> f64 {
    config.sites.iter().map(|s| s.epsilon * s.s2()).sum()
}

/// Spin-wave amplitude transmission `exp(-delta_t / tau_c)`.
pub fn memory_decay_factor(delta_t: f64, tau_c: f64) -> f64 {
    (-delta_t / tau_c).exp()
}

/// Analytic predictions for one configuration.
///
/// Four-fold rates carry the prefactor `E_A² E_B² eps_A eps_B eta_A eta_B`;
/// with `mode_amplitude = 1` they are per-trial probabilities to leading
/// order in the detection efficiencies and comparable with `w_perp`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatePrediction {
    pub two_fold_parallel: f64,
    pub two_fold_perp: f64,
    pub four_fold_parallel: f64,
    pub four_fold_perp: f64,
    pub w_perp: f64,
    pub p1: f64,
    /// `1 - R∥ / R⊥` of the integrated two-fold rates.
    pub visibility_two_fold: f64,
    /// `1 - R∥(4) / W⊥(4)`.
    pub visibility_four_fold: f64,
}

pub fn predict(config: &ExperimentConfig) -> Result<RatePrediction> {
    config.validate()?;
    let (two_fold_parallel, two_fold_perp) = if config.identical_wavepackets() {
        (
            closed_form_two_fold(config, PolarizationConfig::Parallel)?,
            closed_form_two_fold(config, PolarizationConfig::Perpendicular)?,
        )
    } else {
        (
            integrated_two_fold(config, PolarizationConfig::Parallel)?,
            integrated_two_fold(config, PolarizationConfig::Perpendicular)?,
        )
    };
    let four_fold_parallel = four_fold_parallel(config)?;
    let four_fold_perp = four_fold_perpendicular(config)?;
    let w_perp = analytic_w_perp(config)?;
    Ok(RatePrediction {
        two_fold_parallel,
        two_fold_perp,
        four_fold_parallel,
        four_fold_perp,
        w_perp,
        p1: p1(config),
        visibility_two_fold: 1.0 - ratio(two_fold_parallel, two_fold_perp),
        visibility_four_fold: 1.0 - ratio(four_fold_parallel, w_perp),
    })
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        f64::NAN
    } else {
        num / den
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p1_examples() {
        let mut cfg = ExperimentConfig::symmetric(EnsembleParams::chi_for_s2(0.05, 0.8), PolarizationConfig::Parallel);
        for site in &mut cfg.sites {
            site.cos_eta = 0.8;
        }
        assert!((p1(&cfg) - 0.006).abs() < 1e-15);
        let blocked = cfg.with_blocked(Site::B);
        assert!((p1(&blocked) - 0.003).abs() < 1e-15);
        assert_eq!(p1(&ExperimentConfig::symmetric(0.0, PolarizationConfig::Parallel)), 0.0);
    }

    #[test]
    fn decay_factor() {
        assert_eq!(memory_decay_factor(0.0, 30e-6), 1.0);
        assert!((memory_decay_factor(2.0, 2.0) - (-1.0f64).exp()).abs() < 1e-16);
        let f = memory_decay_factor(100e-9, 30e-6);
        assert!((f - 0.996_672).abs() < 1e-6);
    }

    #[test]
    fn symmetric_prediction() {
        let chi = EnsembleParams::chi_for_s2(0.02, (91.0f64 / 122.0).sqrt());
        let p = predict(&ExperimentConfig::symmetric(chi, PolarizationConfig::Parallel)).unwrap();
        assert!((p.visibility_two_fold - 1.0 / 3.0).abs() < 1e-12);
        assert!(p.four_fold_perp > p.four_fold_parallel);
        assert!(p.visibility_four_fold > 0.0 && p.visibility_four_fold < 1.0);
    }
}

//! The two-site HOM circuit of the experiment.

use super::circuit::OpticalCircuit;
use super::detection::{ClickDistribution, Detector};
use super::mixed::MixedState;
use super::registry::{ModeLabel, ModeRegistry, Polarization};
use super::state::FockState;
use crate::analytic::{memory_decay_factor, ExperimentConfig, PolarizationConfig, Site};
use crate::error::Result;

pub const DEFAULT_CUTOFF: usize = 4;

fn signal(port: u8, polarization: Polarization) -> ModeLabel {
    ModeLabel::signal(port, polarization)
}

/// Signal modes of both ports and both polarizations, then the two spin waves.
pub fn experiment_registry(cutoff: usize) -> Result<ModeRegistry> {
    ModeRegistry::new(
        vec![
            signal(1, Polarization::H),
            signal(1, Polarization::V),
            signal(2, Polarization::H),
            signal(2, Polarization::V),
            ModeLabel::SpinWave(Site::A),
            ModeLabel::SpinWave(Site::B),
        ],
        cutoff,
    )
}

/// Writing, signal transport and detection efficiency, optional half-wave
/// plate on site B, the beamsplitter, then memory decay and readout.
pub fn experiment_circuit(config: &ExperimentConfig) -> OpticalCircuit {
    let mut c = OpticalCircuit::new();
    for (site, port) in [(Site::A, 1), (Site::B, 2)] {
        let p = config.site(site);
        c.squeezer(signal(port, Polarization::H), ModeLabel::SpinWave(site), p.squeeze());
    }
    for (site, port) in [(Site::A, 1), (Site::B, 2)] {
        c.loss(signal(port, Polarization::H), config.site(site).epsilon);
    }
    if config.polarization == PolarizationConfig::Perpendicular {
        c.rotation(signal(2, Polarization::H), signal(2, Polarization::V), std::f64::consts::FRAC_PI_2);
    }
    for pol in [Polarization::H, Polarization::V] {
        c.beamsplitter(signal(1, pol), signal(2, pol), config.reflectance);
    }
    for site in Site::BOTH {
        let p = config.site(site);
        let decay = memory_decay_factor(config.delta_t, p.tau_c);
        c.loss(ModeLabel::SpinWave(site), decay * decay)
            .loss(ModeLabel::SpinWave(site), p.retrieval_efficiency)
            .relabel(ModeLabel::SpinWave(site), ModeLabel::Idler(site))
            .loss(ModeLabel::Idler(site), p.idler_epsilon);
    }
    c
}

/// D1, D2 at the two output ports (H and V summed), D3 and D4 on the idlers.
pub fn experiment_detectors() -> Vec<Detector> {
    vec![
        Detector::new("D1", vec![signal(1, Polarization::H), signal(1, Polarization::V)]),
        Detector::new("D2", vec![signal(2, Polarization::H), signal(2, Polarization::V)]),
        Detector::new("D3", vec![ModeLabel::Idler(Site::A)]),
        Detector::new("D4", vec![ModeLabel::Idler(Site::B)]),
    ]
}

/// Joint state after the full circuit. Warns when the cutoff is small for
/// the requested coupling; the truncation shows up in the norm deficit.
pub fn build_experiment_state(config: &ExperimentConfig, cutoff: usize) -> Result<FockState> {
    config.validate()?;
    for site in Site::BOTH {
        let s2 = config.site(site).s2();
        if 3.0 * s2 > cutoff as f64 {
            log::warn!("site {site}: 3 sinh²(chi cos eta) = {:.3} exceeds cutoff {cutoff}", 3.0 * s2);
        }
    }
    let state = experiment_circuit(config).apply(FockState::vacuum(experiment_registry(cutoff)?)?)?;
    if state.norm_deficit() > 1e-6 {
        log::warn!("truncation at cutoff {cutoff} loses {:.3e} of the probability", state.norm_deficit());
    }
    Ok(state)
}

/// Click distribution over (D1, D2, D3, D4).
pub fn experiment_clicks(config: &ExperimentConfig, cutoff: usize) -> Result<ClickDistribution> {
    build_experiment_state(config, cutoff)?.click_probabilities(&experiment_detectors())
}

/// Same distribution through explicit Kraus branches.
pub fn experiment_clicks_mixed(config: &ExperimentConfig, cutoff: usize) -> Result<ClickDistribution> {
    config.validate()?;
    let rho = experiment_circuit(config).apply_mixed(MixedState::vacuum(experiment_registry(cutoff)?)?)?;
    rho.click_probabilities(&experiment_detectors())
}

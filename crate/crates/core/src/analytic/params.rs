use std::fmt;

use super::wavepacket::Wavepacket;
use crate::error::{Error, Result};

/// `cos^2 eta = 91/122`, the value quoted for the 85Rb D1 write scheme.
pub const DEFAULT_COS2_ETA: f64 = 91.0 / 122.0;
pub const DEFAULT_EPSILON: f64 = 0.06;
pub const DEFAULT_RETRIEVAL_EFFICIENCY: f64 = 0.5;
pub const DEFAULT_IDLER_EPSILON: f64 = 0.06;
/// Memory coherence time, s.
pub const DEFAULT_TAU_C: f64 = 30e-6;
/// Write-to-read delay, s.
pub const DEFAULT_DELTA_T: f64 = 100e-9;
pub const DEFAULT_REFLECTANCE: f64 = 0.5;
/// Standard deviation of `|phi|²` for the default Gaussian mode, s.
pub const DEFAULT_WAVEPACKET_WIDTH: f64 = 50e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    A,
    B,
}

impl Site {
    pub const BOTH: [Site; 2] = [Site::A, Site::B];

    pub fn index(self) -> usize {
        match self {
            Site::A => 0,
            Site::B => 1,
        }
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Site::A => "A",
            Site::B => "B",
        })
    }
}

/// Relative linear polarization of the two signal fields at the beamsplitter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolarizationConfig {
    /// Both H: the fields interfere.
    Parallel,
    /// Half-wave plate turns site B's signal to V: no interference.
    Perpendicular,
}

/// Source and detection parameters of one atomic ensemble.
#[derive(Clone, Debug, PartialEq)]
pub struct EnsembleParams {
    /// Parametric coupling `chi`.
    pub chi: f64,
    pub cos_eta: f64,
    /// Overall probability that a signal photon from this site is detected
    /// by D1 or D2.
    pub epsilon: f64,
    /// Spin-wave to idler conversion probability of the read pulse.
    pub retrieval_efficiency: f64,
    /// Idler detection probability at D3 / D4.
    pub idler_epsilon: f64,
    /// Memory coherence time, s.
    pub tau_c: f64,
    pub wavepacket: Wavepacket,
    /// Field scale `E`; arbitrary units, cancels in every ratio.
    pub mode_amplitude: f64,
}

impl EnsembleParams {
    /// Default operating point with the given coupling.
    pub fn with_chi(chi: f64) -> Self {
        EnsembleParams {
            chi,
            cos_eta: DEFAULT_COS2_ETA.sqrt(),
            epsilon: DEFAULT_EPSILON,
            retrieval_efficiency: DEFAULT_RETRIEVAL_EFFICIENCY,
            idler_epsilon: DEFAULT_IDLER_EPSILON,
            tau_c: DEFAULT_TAU_C,
            wavepacket: Wavepacket::Gaussian {
                center: 0.0,
                width: DEFAULT_WAVEPACKET_WIDTH,
            },
            mode_amplitude: 1.0,
        }
    }

    /// Coupling that gives `sinh²(chi cos eta) = s2`.
    pub fn chi_for_s2(s2: f64, cos_eta: f64) -> f64 {
        s2.sqrt().asinh() / cos_eta
    }

    /// Two-mode squeeze parameter `chi cos eta` of the H channel.
    pub fn squeeze(&self) -> f64 {
        self.chi * self.cos_eta
    }

    /// `s = sinh(chi cos eta)`.
    pub fn s(&self) -> f64 {
        self.squeeze().sinh()
    }

    /// `s²`, the mean signal photon number of the H channel.
    pub fn s2(&self) -> f64 {
        let s = self.s();
        s * s
    }

    /// Effective detected-field weight `E² epsilon` entering the signal rates.
    pub fn signal_weight(&self) -> f64 {
        self.mode_amplitude * self.mode_amplitude * self.epsilon
    }

    /// Idler detection probability per stored excitation after a delay
    /// `delta_t`: `exp(-2 delta_t / tau_c) * retrieval * idler_epsilon`.
    pub fn idler_efficiency(&self, delta_t: f64) -> f64 {
        let decay = (-delta_t / self.tau_c).exp();
        decay * decay * self.retrieval_efficiency * self.idler_epsilon
    }

    /// The same ensemble with its MOT blocked.
    pub fn blocked(&self) -> Self {
        EnsembleParams { chi: 0.0, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.chi.is_finite() {
            return Err(Error::domain(format!("chi = {} is not finite", self.chi)));
        }
        if !(-1.0..=1.0).contains(&self.cos_eta) {
            return Err(Error::domain(format!("cos_eta = {} outside [-1, 1]", self.cos_eta)));
        }
        for (name, p) in [
            ("epsilon", self.epsilon),
            ("retrieval_efficiency", self.retrieval_efficiency),
            ("idler_epsilon", self.idler_epsilon),
        ] {
            check_probability(name, p)?;
        }
        if !(self.tau_c > 0.0) {
            return Err(Error::domain(format!("tau_c = {} must be positive", self.tau_c)));
        }
        if !self.mode_amplitude.is_finite() || self.mode_amplitude < 0.0 {
            return Err(Error::domain(format!("mode_amplitude = {} must be non-negative", self.mode_amplitude)));
        }
        Ok(())
    }
}

/// Beamsplitter, polarization setting, read delay and both sources.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    /// Beamsplitter reflectance `R`; `T = 1 - R`.
    pub reflectance: f64,
    pub polarization: PolarizationConfig,
    /// Write-to-read delay, s.
    pub delta_t: f64,
    pub sites: [EnsembleParams; 2],
}

impl ExperimentConfig {
    /// Identical sites with coupling `chi`, 50/50 beamsplitter, default delay.
    pub fn symmetric(chi: f64, polarization: PolarizationConfig) -> Self {
        let site = EnsembleParams::with_chi(chi);
        ExperimentConfig {
            reflectance: DEFAULT_REFLECTANCE,
            polarization,
            delta_t: DEFAULT_DELTA_T,
            sites: [site.clone(), site],
        }
    }

    pub fn transmittance(&self) -> f64 {
        1.0 - self.reflectance
    }

    pub fn site(&self, site: Site) -> &EnsembleParams {
        &self.sites[site.index()]
    }

    pub fn site_mut(&mut self, site: Site) -> &mut EnsembleParams {
        &mut self.sites[site.index()]
    }

    pub fn with_polarization(&self, polarization: PolarizationConfig) -> Self {
        ExperimentConfig {
            polarization,
            ..self.clone()
        }
    }

    /// Copy with `site`'s source switched off.
    pub fn with_blocked(&self, site: Site) -> Self {
        let mut cfg = self.clone();
        let blocked = cfg.site(site).blocked();
        *cfg.site_mut(site) = blocked;
        cfg
    }

    pub fn identical_wavepackets(&self) -> bool {
        self.sites[0].wavepacket == self.sites[1].wavepacket
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("reflectance", self.reflectance)?;
        if !(self.delta_t >= 0.0) || !self.delta_t.is_finite() {
            return Err(Error::domain(format!("delta_t = {} must be non-negative", self.delta_t)));
        }
        self.sites.iter().try_for_each(EnsembleParams::validate)
    }
}

pub(crate) fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {p} outside [0, 1]")))
    }
}

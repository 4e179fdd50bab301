//! Threshold (click / no-click) detection.

use num_complex::Complex64;

use super::basis::Layout;
use super::registry::{ModeLabel, ModeRegistry};
use super::state::FockState;
use crate::error::{Error, Result};

/// A polarization-insensitive on/off detector watching a set of modes.
#[derive(Clone, Debug, PartialEq)]
pub struct Detector {
    pub name: String,
    pub modes: Vec<ModeLabel>,
}

impl Detector {
    pub fn new(name: &str, modes: Vec<ModeLabel>) -> Self {
        Detector {
            name: name.to_string(),
            modes,
        }
    }
}

/// Joint click distribution. Pattern `k` has detector `d` firing iff bit `d`
/// of `k` is set.
#[derive(Clone, Debug, PartialEq)]
pub struct ClickDistribution {
    pub names: Vec<String>,
    pub probabilities: Vec<f64>,
    /// Probability lost to truncation; the probabilities sum to `1 - leakage`.
    pub leakage: f64,
}

impl ClickDistribution {
    /// Probability that every detector in `mask` fires.
    pub fn marginal(&self, mask: usize) -> f64 {
        self.probabilities.iter().enumerate().filter(|(k, _)| k & mask == mask).map(|(_, p)| p).sum()
    }

    pub fn detector_count(&self) -> usize {
        self.names.len()
    }
}

/// Resolves detector modes to indices, rejecting unknown or shared modes.
pub(crate) fn resolve(registry: &ModeRegistry, detectors: &[Detector]) -> Result<Vec<Vec<usize>>> {
    let mut seen = vec![false; registry.len()];
    let mut out = Vec::with_capacity(detectors.len());
    for d in detectors {
        let mut idx = Vec::with_capacity(d.modes.len());
        for mode in &d.modes {
            let m = registry.index_of(mode)?;
            if seen[m] {
                return Err(Error::domain(format!("mode {mode} watched by more than one detector")));
            }
            seen[m] = true;
            idx.push(m);
        }
        out.push(idx);
    }
    if detectors.len() > 16 {
        return Err(Error::domain("at most 16 detectors are supported"));
    }
    Ok(out)
}

/// `Σ_i |a_i|² P(pattern | occupations_i)` with each mode thinned by its
/// transmission before the threshold test.
pub(crate) fn accumulate(
    layout: &Layout,
    amplitudes: &[Complex64],
    transmissions: &[f64],
    detectors: &[Vec<usize>],
    out: &mut [f64],
) {
    let k = detectors.len();
    let mut silent = vec![0.0; k];
    let mut fire = vec![0.0; k];
    for (idx, a) in amplitudes.iter().enumerate() {
        let w = a.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (d, modes) in detectors.iter().enumerate() {
            let log_silent: f64 = modes
                .iter()
                .map(|&m| log_no_click(layout.occupation(idx, m), transmissions[m]))
                .sum();
            silent[d] = log_silent.exp();
            fire[d] = -log_silent.exp_m1();
        }
        for (pattern, slot) in out.iter_mut().enumerate() {
            let mut p = w;
            for d in 0..k {
                p *= if pattern >> d & 1 == 1 { fire[d] } else { silent[d] };
                if p == 0.0 {
                    break;
                }
            }
            *slot += p;
        }
    }
}

/// `ln (1 - t)^n`, exact at `n = 0` and `t = 1`.
fn log_no_click(n: usize, t: f64) -> f64 {
    if n == 0 {
        0.0
    } else if t == 1.0 {
        f64::NEG_INFINITY
    } else {
        n as f64 * (-t).ln_1p()
    }
}

impl FockState {
    /// Joint click probabilities of threshold detectors, pending loss
    /// included. Modes not watched by any detector are traced out.
    pub fn click_probabilities(&self, detectors: &[Detector]) -> Result<ClickDistribution> {
        let resolved = resolve(&self.registry, detectors)?;
        let mut probabilities = vec![0.0; 1 << detectors.len()];
        accumulate(&self.layout(), &self.amplitudes, &self.pending, &resolved, &mut probabilities);
        Ok(ClickDistribution {
            names: detectors.iter().map(|d| d.name.clone()).collect(),
            probabilities,
            leakage: self.norm_deficit().max(0.0),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reg() -> ModeRegistry {
        ModeRegistry::new(vec![ModeLabel::named("a"), ModeLabel::named("b")], 3).unwrap()
    }

    #[test]
    fn vacuum_never_clicks() {
        let s = FockState::vacuum(reg()).unwrap();
        let d = s.click_probabilities(&[Detector::new("D", vec![ModeLabel::named("a")])]).unwrap();
        assert_eq!(d.probabilities, vec![1.0, 0.0]);
    }

    #[test]
    fn single_photon_always_clicks() {
        let s = FockState::number_state(reg(), &[1, 0]).unwrap();
        let d = s
            .click_probabilities(&[Detector::new("D", vec![ModeLabel::named("a"), ModeLabel::named("b")])])
            .unwrap();
        assert_eq!(d.probabilities, vec![0.0, 1.0]);
    }

    #[test]
    fn overlapping_detectors_are_rejected() {
        let s = FockState::vacuum(reg()).unwrap();
        let a = ModeLabel::named("a");
        let err = s.click_probabilities(&[Detector::new("1", vec![a.clone()]), Detector::new("2", vec![a])]);
        assert!(err.is_err());
    }

    #[test]
    fn no_click_handles_edges() {
        assert_eq!(log_no_click(0, 1.0).exp(), 1.0);
        assert_eq!(log_no_click(3, 1.0).exp(), 0.0);
        assert_eq!(-log_no_click(3, 1.0).exp_m1(), 1.0);
        assert_eq!(log_no_click(2, 0.0).exp(), 1.0);
        assert!((log_no_click(2, 0.5).exp() - 0.25).abs() < 1e-16);
    }
}

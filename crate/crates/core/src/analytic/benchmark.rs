//! Blocked-source statistics and the `W⊥(4)` benchmark built from them.

use super::params::{ExperimentConfig, Site};
use crate::error::{Error, Result};

/// Number of detectors: D1, D2 (signal ports), D3, D4 (idlers of A and B).
pub const DETECTORS: usize = 4;
/// Click patterns are bit masks with D1 as bit 0 and D4 as bit 3.
pub const PATTERNS: usize = 1 << DETECTORS;
pub const D1: usize = 1;
pub const D2: usize = 1 << 1;
pub const D3: usize = 1 << 2;
pub const D4: usize = 1 << 3;
pub const SIGNAL_PAIR: usize = D1 | D2;
pub const FOUR_FOLD: usize = D1 | D2 | D3 | D4;

/// Idler detector of a site.
pub fn idler_detector(site: Site) -> usize {
    match site {
        Site::A => D3,
        Site::B => D4,
    }
}

/// Joint click-pattern distribution of a run with only `site` operating.
#[derive(Clone, Debug, PartialEq)]
pub struct SiteClickStats {
    site: Site,
    probabilities: [f64; PATTERNS],
}

const MAX_PAIRS: usize = 200_000;

impl SiteClickStats {
    /// Exact statistics of `site`'s source alone, with threshold detectors.
    ///
    /// The source emits `n` pairs with probability `(1 - l) l^n`, `l =
    /// tanh²(chi cos eta)`; each signal photon reaches D1 or D2 independently
    /// and each idler photon is detected with the site's idler efficiency.
    pub fn analytic(config: &ExperimentConfig, site: Site) -> Result<Self> {
        let params = config.site(site);
        let (r, t) = (config.reflectance, config.transmittance());
        let (to_d1, to_d2) = match site {
            Site::A => (params.epsilon * t, params.epsilon * r),
            Site::B => (params.epsilon * r, params.epsilon * t),
        };
        let eta = params.idler_efficiency(config.delta_t);
        let lambda = params.squeeze().tanh().powi(2);
        let mut probabilities = [0.0; PATTERNS];
        if lambda == 0.0 {
            probabilities[0] = 1.0;
            return Ok(SiteClickStats { site, probabilities });
        }
        let lost = 1.0 - to_d1 - to_d2;
        let mut weight = 1.0 - lambda;
        let mut n = 0usize;
        while weight > 1e-18 * (1.0 - lambda) || n < 2 {
            if n > MAX_PAIRS {
                return Err(Error::domain(format!("pair distribution with tanh² r = {lambda} does not converge")));
            }
            let signal = signal_patterns(n, to_d1, to_d2, lost);
            let idler_dark = (1.0 - eta).powi(n as i32);
            let idler_click = -((n as f64) * (-eta).ln_1p()).exp_m1();
            for (pattern, &p) in signal.iter().enumerate() {
                probabilities[pattern] += weight * p * idler_dark;
                probabilities[pattern | idler_detector(site)] += weight * p * idler_click;
            }
            weight *= lambda;
            n += 1;
        }
        Ok(SiteClickStats { site, probabilities })
    }

    /// Empirical statistics from pattern counts of a blocked run.
    pub fn from_counts(site: Site, counts: &[u64; PATTERNS]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::MissingData(format!("blocked run for site {site} has no trials")));
        }
        let probabilities = counts.map(|c| c as f64 / total as f64);
        Ok(SiteClickStats { site, probabilities })
    }

    /// Statistics from an arbitrary pattern distribution (e.g. from the Fock
    /// engine); renormalized to unit mass.
    pub fn from_probabilities(site: Site, probabilities: [f64; PATTERNS]) -> Result<Self> {
        let total: f64 = probabilities.iter().sum();
        if !(total > 0.0) || probabilities.iter().any(|&p| p < 0.0) {
            return Err(Error::MissingData(format!("invalid click distribution for site {site}")));
        }
        Ok(SiteClickStats {
            site,
            probabilities: probabilities.map(|p| p / total),
        })
    }

    pub fn site(&self) -> Site {
        self.site
    }

    pub fn probabilities(&self) -> &[f64; PATTERNS] {
        &self.probabilities
    }

    /// Probability that every detector in `mask` clicks.
    pub fn marginal(&self, mask: usize) -> f64 {
        self.probabilities.iter().enumerate().filter(|(k, _)| k & mask == mask).map(|(_, p)| p).sum()
    }
}

/// Exact click-pattern probabilities over (D1, D2) for `n` photons each sent
/// to D1, D2 or lost.
fn signal_patterns(n: usize, to_d1: f64, to_d2: f64, lost: f64) -> [f64; 4] {
    let nf = n as f64;
    let none = lost.powi(n as i32);
    // x^n - lost^n for x = lost + p, without cancellation.
    let lift = |p: f64| {
        if lost > 0.0 {
            none * (nf * (p / lost).ln_1p()).exp_m1()
        } else {
            p.powi(n as i32) - none
        }
    };
    let only_1 = lift(to_d1);
    let only_2 = lift(to_d2);
    // P(D1 clicks) - P(D1 only).
    let any_1 = -(nf * (-to_d1).ln_1p()).exp_m1();
    let both = (any_1 - only_1).max(0.0);
    [none, only_1, only_2, both]
}

/// Expected four-fold probability per trial for two independent sources,
/// each characterised by a run with the other one blocked: the two runs'
/// patterns are OR-ed and all four detectors must fire.
pub fn w_perp_benchmark(site_a: Option<&SiteClickStats>, site_b: Option<&SiteClickStats>) -> Result<f64> {
    let a = site_a.ok_or_else(|| Error::MissingData("statistics of site A alone are missing".into()))?;
    let b = site_b.ok_or_else(|| Error::MissingData("statistics of site B alone are missing".into()))?;
    if a.site != Site::A || b.site != Site::B {
        return Err(Error::MissingData("w_perp needs site A statistics first, site B second".into()));
    }
    let mut total = 0.0;
    for (pa, &qa) in a.probabilities.iter().enumerate() {
        for (pb, &qb) in b.probabilities.iter().enumerate() {
            if pa | pb == FOUR_FOLD {
                total += qa * qb;
            }
        }
    }
    Ok(total)
}

/// [`w_perp_benchmark`] from the analytic single-site statistics.
pub fn analytic_w_perp(config: &ExperimentConfig) -> Result<f64> {
    let a = SiteClickStats::analytic(config, Site::A)?;
    let b = SiteClickStats::analytic(config, Site::B)?;
    w_perp_benchmark(Some(&a), Some(&b))
}

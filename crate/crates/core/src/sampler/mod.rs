//! Monte Carlo reproduction of the counting experiment.

pub mod rng;

use std::fmt;

use rand::seq::SliceRandom;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::analytic::benchmark::{D1, D2, DETECTORS, FOUR_FOLD, PATTERNS, SIGNAL_PAIR};
use crate::analytic::{ExperimentConfig, PolarizationConfig, Site};
use crate::error::{Error, Result};
use crate::fock::{experiment_clicks, DEFAULT_CUTOFF};
use rng::{derive_seed, draw_uniform, SplitMix64};

/// Largest truncation leakage the sampler accepts.
pub const MAX_LEAKAGE: f64 = 1e-4;
const CHUNK: usize = 1 << 16;
const BOOTSTRAP_RESAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Scenario {
    Parallel,
    Perpendicular,
    /// Site A's MOT blocked: only site B emits.
    BlockedA,
    /// Site B's MOT blocked: only site A emits.
    BlockedB,
}

impl Scenario {
    pub const ALL: [Scenario; 4] = [Scenario::Parallel, Scenario::Perpendicular, Scenario::BlockedA, Scenario::BlockedB];

    /// The experiment as run in this scenario. Blocked runs use the
    /// perpendicular setting.
    pub fn apply(self, base: &ExperimentConfig) -> ExperimentConfig {
        match self {
            Scenario::Parallel => base.with_polarization(PolarizationConfig::Parallel),
            Scenario::Perpendicular => base.with_polarization(PolarizationConfig::Perpendicular),
            Scenario::BlockedA => base.with_polarization(PolarizationConfig::Perpendicular).with_blocked(Site::A),
            Scenario::BlockedB => base.with_polarization(PolarizationConfig::Perpendicular).with_blocked(Site::B),
        }
    }

    fn label(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scenario::Parallel => "parallel",
            Scenario::Perpendicular => "perpendicular",
            Scenario::BlockedA => "blocked_A",
            Scenario::BlockedB => "blocked_B",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialPlan {
    pub n_trials: u64,
    pub seed: u64,
    pub scenario: Scenario,
    pub config: ExperimentConfig,
    pub cutoff: usize,
    /// Per-detector, per-trial dark-click probability, OR-ed onto the
    /// sampled pattern.
    pub dark_counts: [f64; DETECTORS],
}

impl TrialPlan {
    pub fn new(config: ExperimentConfig, scenario: Scenario, n_trials: u64, seed: u64) -> Self {
        TrialPlan {
            n_trials,
            seed,
            scenario,
            config,
            cutoff: DEFAULT_CUTOFF,
            dark_counts: [0.0; DETECTORS],
        }
    }
}

/// A counting rate `k / N` with its binomial standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

impl Estimate {
    pub fn binomial(count: u64, n: u64) -> Self {
        let p = count as f64 / n as f64;
        Estimate {
            value: p,
            error: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// `self / other` with relative errors added in quadrature. A zero
    /// numerator or denominator gives an infinite error.
    pub fn ratio(self, other: Estimate) -> Estimate {
        let value = self.value / other.value;
        let rel = if self.value == 0.0 || other.value == 0.0 {
            f64::INFINITY
        } else {
            ((self.error / self.value).powi(2) + (other.error / other.value).powi(2)).sqrt()
        };
        let error = if rel.is_infinite() { f64::INFINITY } else { (value * rel).abs() };
        Estimate { value, error }
    }
}

/// Aggregated click statistics of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct CountsReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub n_trials: u64,
    /// Number of trials with each exact click pattern.
    pub patterns: [u64; PATTERNS],
    /// Truncation leakage of the probability table that was sampled.
    pub leakage: f64,
    outcomes: Vec<u8>,
}

impl CountsReport {
    /// Trials in which every detector of `mask` fired.
    pub fn count(&self, mask: usize) -> u64 {
        self.patterns.iter().enumerate().filter(|(k, _)| k & mask == mask).map(|(_, c)| c).sum()
    }

    /// `N_1 .. N_4`.
    pub fn singles(&self) -> [u64; DETECTORS] {
        [0, 1, 2, 3].map(|d| self.count(1 << d))
    }

    pub fn pair_12(&self) -> u64 {
        self.count(SIGNAL_PAIR)
    }

    pub fn quad_1234(&self) -> u64 {
        self.count(FOUR_FOLD)
    }

    /// `(N_1 + N_2) / N_T`.
    pub fn p1_hat(&self) -> Estimate {
        let n = self.n_trials as f64;
        let (n1, n2) = (self.count(D1) as f64, self.count(D2) as f64);
        // Var(X1 + X2) per trial, from the joint pattern counts.
        let both = self.count(D1 | D2) as f64;
        let mean = (n1 + n2) / n;
        let second = (n1 + n2 + 2.0 * both) / n;
        Estimate {
            value: mean,
            error: ((second - mean * mean).max(0.0) / n).sqrt(),
        }
    }

    pub fn rate(&self, mask: usize) -> Estimate {
        Estimate::binomial(self.count(mask), self.n_trials)
    }

    /// Per-trial click patterns in trial order.
    pub fn outcomes(&self) -> &[u8] {
        &self.outcomes
    }

    /// Copy without the per-trial record.
    pub fn summary(&self) -> CountsReport {
        CountsReport {
            outcomes: Vec::new(),
            ..self.clone()
        }
    }
}

/// Folds independent dark clicks into an exact pattern distribution.
pub fn with_dark_counts(probabilities: &[f64], dark_counts: &[f64]) -> Vec<f64> {
    let mut out = probabilities.to_vec();
    for (d, &p) in dark_counts.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let bit = 1 << d;
        for k in 0..out.len() {
            if k & bit == 0 {
                let moved = out[k] * p;
                out[k] -= moved;
                out[k | bit] += moved;
            }
        }
    }
    out
}

/// Cumulative table over the 16 patterns; zero-probability patterns can
/// never be drawn.
fn cumulative(probabilities: &[f64]) -> Vec<f64> {
    let total: f64 = probabilities.iter().sum();
    let mut acc = 0.0;
    let mut cum: Vec<f64> = probabilities
        .iter()
        .map(|p| {
            acc += p / total;
            acc
        })
        .collect();
    if let Some(last) = probabilities.iter().rposition(|&p| p > 0.0) {
        for c in &mut cum[last..] {
            *c = 1.0;
        }
    }
    cum
}

/// Samples `plan.n_trials` independent trials from the engine's click
/// distribution. Identical for a given seed regardless of thread count.
pub fn run_trials(plan: &TrialPlan) -> Result<CountsReport> {
    if plan.n_trials == 0 {
        return Err(Error::domain("n_trials must be at least 1"));
    }
    for &p in &plan.dark_counts {
        crate::analytic::params::check_probability("dark count probability", p)?;
    }
    let config = plan.scenario.apply(&plan.config);
    let dist = experiment_clicks(&config, plan.cutoff)?;
    if dist.leakage > MAX_LEAKAGE {
        return Err(Error::Truncation {
            leakage: dist.leakage,
            limit: MAX_LEAKAGE,
            cutoff: plan.cutoff,
        });
    }
    Ok(sample(&dist.probabilities, dist.leakage, plan))
}

fn sample(probabilities: &[f64], leakage: f64, plan: &TrialPlan) -> CountsReport {
    let cum = cumulative(probabilities);
    let seed = derive_seed(plan.seed, plan.scenario.label());
    let n = plan.n_trials as usize;
    let darks = plan.dark_counts;
    let chunks: Vec<(Vec<u8>, [u64; PATTERNS])> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let range = c * CHUNK..((c + 1) * CHUNK).min(n);
            let mut outcomes = Vec::with_capacity(range.len());
            let mut counts = [0u64; PATTERNS];
            for i in range {
                let trial = i as u64;
                let u = draw_uniform(seed, trial, 0);
                let mut pattern = cum.partition_point(|&x| x <= u).min(PATTERNS - 1);
                for (d, &p) in darks.iter().enumerate() {
                    if p > 0.0 && draw_uniform(seed, trial, 1 + d as u64) < p {
                        pattern |= 1 << d;
                    }
                }
                outcomes.push(pattern as u8);
                counts[pattern] += 1;
            }
            (outcomes, counts)
        })
        .collect();
    let mut patterns = [0u64; PATTERNS];
    let mut outcomes = Vec::with_capacity(n);
    for (o, c) in chunks {
        outcomes.extend_from_slice(&o);
        for k in 0..PATTERNS {
            patterns[k] += c[k];
        }
    }
    CountsReport {
        scenario: plan.scenario,
        seed: plan.seed,
        n_trials: plan.n_trials,
        patterns,
        leakage,
        outcomes,
    }
}

/// Benchmark four-fold rate synthesised from two single-site runs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WPerpEstimate {
    pub value: f64,
    /// Bootstrap standard error.
    pub error: f64,
    pub hits: u64,
    pub pairs: u64,
    /// `error / value`; infinite when no synthetic four-fold was seen.
    pub relative_error: f64,
}

/// Pairs trial `i` of the site-A run (B blocked) with trial `pi(i)` of the
/// site-B run (A blocked), `pi` a permutation fixed by `seed`, and counts
/// pairs whose combined patterns fire all four detectors.
pub fn estimate_w_perp(site_a_run: &CountsReport, site_b_run: &CountsReport, seed: u64) -> Result<WPerpEstimate> {
    if site_a_run.scenario != Scenario::BlockedB || site_b_run.scenario != Scenario::BlockedA {
        return Err(Error::MissingData(
            "w_perp needs the run with B blocked first and the run with A blocked second".into(),
        ));
    }
    let (a, b) = (site_a_run.outcomes(), site_b_run.outcomes());
    let pairs = a.len().min(b.len());
    if pairs == 0 {
        return Err(Error::MissingData("blocked runs carry no per-trial outcomes".into()));
    }
    let mut order: Vec<u32> = (0..pairs as u32).collect();
    let mut stream = SplitMix64::new(derive_seed(seed, 0x57_5045_5250));
    order.shuffle(&mut stream);
    let hits = order
        .iter()
        .enumerate()
        .filter(|&(i, &j)| (a[i] | b[j as usize]) as usize == FOUR_FOLD)
        .count() as u64;
    let n = pairs as u64;
    let value = hits as f64 / n as f64;
    // The statistic is a mean of per-pair indicators, so a resample's hit
    // count is Binomial(N, hits / N).
    let binom = Binomial::new(n, value).map_err(|e| Error::domain(e.to_string()))?;
    let draws: Vec<f64> = (0..BOOTSTRAP_RESAMPLES)
        .map(|_| binom.sample(&mut stream) as f64 / n as f64)
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    let error = var.sqrt();
    let relative_error = if hits == 0 {
        log::warn!("no synthetic four-fold events in {n} paired blocked trials; W_perp relative error is infinite");
        f64::INFINITY
    } else {
        error / value
    };
    Ok(WPerpEstimate {
        value,
        error,
        hits,
        pairs: n,
        relative_error,
    })
}

/// Settings shared by every point of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepSettings {
    pub n_trials: u64,
    pub seed: u64,
    pub cutoff: usize,
    pub dark_counts: [f64; DETECTORS],
}

/// One sweep point: all four scenarios at a single configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub config: ExperimentConfig,
    pub p1_hat: Estimate,
    /// Two-fold `N12∥ / N12⊥`.
    pub two_fold_ratio: Estimate,
    pub w_perp: WPerpEstimate,
    /// `R∥(4) / W⊥(4)`.
    pub par_over_w_perp: Estimate,
    /// `R⊥(4) / W⊥(4)`.
    pub perp_over_w_perp: Estimate,
    pub parallel: CountsReport,
    pub perpendicular: CountsReport,
    pub blocked_a: CountsReport,
    pub blocked_b: CountsReport,
}

/// Runs every configuration under all four scenarios; rows are returned in
/// order of increasing analytic `p1`.
pub fn sweep(configs: &[ExperimentConfig], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    let mut order: Vec<usize> = (0..configs.len()).collect();
    order.sort_by(|&i, &j| crate::analytic::p1(&configs[i]).total_cmp(&crate::analytic::p1(&configs[j])));
    order.into_iter().map(|i| sweep_point(&configs[i], i as u64, settings)).collect()
}

fn sweep_point(config: &ExperimentConfig, index: u64, settings: &SweepSettings) -> Result<SweepRow> {
    let seed = derive_seed(settings.seed, index);
    let run = |scenario| {
        let mut plan = TrialPlan::new(config.clone(), scenario, settings.n_trials, seed);
        plan.cutoff = settings.cutoff;
        plan.dark_counts = settings.dark_counts;
        run_trials(&plan)
    };
    let [parallel, perpendicular, blocked_a, blocked_b] = Scenario::ALL.map(run);
    let (parallel, perpendicular, blocked_a, blocked_b) = (parallel?, perpendicular?, blocked_a?, blocked_b?);
    let w_perp = estimate_w_perp(&blocked_b, &blocked_a, seed)?;
    let w = Estimate {
        value: w_perp.value,
        error: w_perp.error,
    };
    let pooled = {
        let n = parallel.n_trials + perpendicular.n_trials;
        let mut patterns = parallel.patterns;
        for (p, q) in patterns.iter_mut().zip(perpendicular.patterns) {
            *p += q;
        }
        CountsReport {
            n_trials: n,
            patterns,
            ..perpendicular.summary()
        }
        .p1_hat()
    };
    Ok(SweepRow {
        config: config.clone(),
        p1_hat: pooled,
        two_fold_ratio: parallel.rate(SIGNAL_PAIR).ratio(perpendicular.rate(SIGNAL_PAIR)),
        w_perp,
        par_over_w_perp: parallel.rate(FOUR_FOLD).ratio(w),
        perp_over_w_perp: perpendicular.rate(FOUR_FOLD).ratio(w),
        parallel: parallel.summary(),
        perpendicular: perpendicular.summary(),
        blocked_a: blocked_a.summary(),
        blocked_b: blocked_b.summary(),
    })
}

//! Run configuration: a TOML file with strict keys, overridable by flags.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::Deserialize;

use crate::analytic::benchmark::DETECTORS;
use crate::analytic::params::{self, EnsembleParams, ExperimentConfig, PolarizationConfig};
use crate::analytic::{SampledProfile, Wavepacket};
use crate::angular_momentum::{mixing_angle, ratio_to_f64, Half, LevelScheme};
use crate::error::{Error, Result};

pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_TRIALS: u64 = 1_000_000;
/// Keeps truncation leakage below the sampler limit up to p1 = 0.02 at the
/// default detection efficiency.
pub const DEFAULT_CUTOFF: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Analytic,
    Fock,
    Montecarlo,
    Compare,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Analytic => "analytic",
            Mode::Fock => "fock",
            Mode::Montecarlo => "montecarlo",
            Mode::Compare => "compare",
        }
    }

    pub fn uses_fock(self) -> bool {
        matches!(self, Mode::Fock | Mode::Compare)
    }

    pub fn uses_montecarlo(self) -> bool {
        matches!(self, Mode::Montecarlo | Mode::Compare)
    }

    pub fn uses_analytic(self) -> bool {
        !matches!(self, Mode::Montecarlo)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParameter {
    /// Both sites' coupling set to the grid value.
    Chi,
    /// Couplings chosen so that `eps_A s_A² = eps_B s_B² = p1 / 2`.
    P1,
    Reflectance,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    #[default]
    Linear,
    Log,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Chi => "chi",
            SweepParameter::P1 => "p1",
            SweepParameter::Reflectance => "reflectance",
        }
    }
}

impl Scale {
    pub fn name(self) -> &'static str {
        match self {
            Scale::Linear => "linear",
            Scale::Log => "log",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub parameter: SweepParameter,
    pub min: f64,
    pub max: f64,
    pub points: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepSpec {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if self.points == 0 {
            return Err(Error::Config("sweep.points must be at least 1".into()));
        }
        if !(self.min.is_finite() && self.max.is_finite()) || self.max < self.min {
            return Err(Error::Config(format!("sweep range [{}, {}] is empty or not finite", self.min, self.max)));
        }
        if self.points == 1 {
            return Ok(vec![self.min]);
        }
        let step = |k: usize| k as f64 / (self.points - 1) as f64;
        match self.scale {
            Scale::Linear => Ok((0..self.points).map(|k| self.min + (self.max - self.min) * step(k)).collect()),
            Scale::Log => {
                if self.min <= 0.0 {
                    return Err(Error::Config(format!("sweep.min = {} must be positive for a log scale", self.min)));
                }
                let (lo, hi) = (self.min.ln(), self.max.ln());
                Ok((0..self.points).map(|k| (lo + (hi - lo) * step(k)).exp()).collect())
            }
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    mode: Option<Mode>,
    seed: Option<u64>,
    cutoff: Option<usize>,
    n_trials: Option<u64>,
    output: Option<PathBuf>,
    experiment: Option<ExperimentSection>,
    scheme: Option<SchemeSection>,
    site_a: Option<SiteSection>,
    site_b: Option<SiteSection>,
    sweep: Option<SweepSpec>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentSection {
    reflectance: Option<f64>,
    delta_t: Option<f64>,
    cos2_eta: Option<f64>,
    /// Coupling shared by both sites unless a site overrides it.
    chi: Option<f64>,
    dark_counts: Option<[f64; DETECTORS]>,
}

/// Level scheme from which cos² eta is computed instead of taken as given.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeSection {
    f_a: f64,
    f_b: f64,
    f_c: f64,
    populations: Option<Vec<f64>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteSection {
    chi: Option<f64>,
    epsilon: Option<f64>,
    retrieval_efficiency: Option<f64>,
    idler_epsilon: Option<f64>,
    tau_c: Option<f64>,
    mode_amplitude: Option<f64>,
    wavepacket: Option<WavepacketSection>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
enum WavepacketSection {
    Gaussian {
        center: f64,
        width: f64,
    },
    Square {
        center: f64,
        width: f64,
    },
    Sampled {
        start: f64,
        step: f64,
        re: Vec<f64>,
        im: Option<Vec<f64>>,
    },
}

/// Where the configured cos² eta came from.
#[derive(Clone, Debug, PartialEq)]
pub enum Cos2EtaSource {
    Default,
    Given,
    Scheme { f_a: f64, f_b: f64, f_c: f64, exact: String },
}

/// Fully resolved run settings.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    /// Base experiment; sweeps vary one parameter of it.
    pub experiment: ExperimentConfig,
    pub cos2_eta: f64,
    pub cos2_eta_source: Cos2EtaSource,
    pub dark_counts: [f64; DETECTORS],
    pub sweep: Option<SweepSpec>,
    pub output: PathBuf,
    pub seed: u64,
    pub cutoff: usize,
    pub n_trials: u64,
    /// Whether the base experiment has a coupling (needed unless a sweep over
    /// chi or p1 provides it).
    chi_given: bool,
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

/// Reads and validates a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    parse_config_str(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse_config_str(text: &str) -> Result<RunConfig> {
    let file: FileConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    build(file).map_err(config_error)
}

fn build(file: FileConfig) -> Result<RunConfig> {
    let exp = file.experiment.unwrap_or_default();
    let (cos2_eta, cos2_eta_source) = match (&file.scheme, exp.cos2_eta) {
        (Some(_), Some(_)) => {
            return Err(Error::Config("give either experiment.cos2_eta or a [scheme] section, not both".into()))
        }
        (Some(s), None) => scheme_cos2_eta(s)?,
        (None, Some(c)) => (c, Cos2EtaSource::Given),
        (None, None) => (params::DEFAULT_COS2_ETA, Cos2EtaSource::Default),
    };
    if !(0.0..=1.0).contains(&cos2_eta) {
        return Err(Error::Config(format!("experiment.cos2_eta = {cos2_eta} outside [0, 1]")));
    }
    let mut sites = [EnsembleParams::with_chi(0.0), EnsembleParams::with_chi(0.0)];
    let mut chi_given = true;
    for (site, (section, name)) in sites.iter_mut().zip([(&file.site_a, "site_a"), (&file.site_b, "site_b")]) {
        let sec = section.as_ref();
        site.cos_eta = cos2_eta.sqrt();
        match sec.and_then(|s| s.chi).or(exp.chi) {
            Some(chi) => site.chi = chi,
            None => chi_given = false,
        }
        if let Some(s) = sec {
            set(&mut site.epsilon, s.epsilon);
            set(&mut site.retrieval_efficiency, s.retrieval_efficiency);
            set(&mut site.idler_epsilon, s.idler_epsilon);
            set(&mut site.tau_c, s.tau_c);
            set(&mut site.mode_amplitude, s.mode_amplitude);
            if let Some(w) = &s.wavepacket {
                site.wavepacket = wavepacket(w).map_err(|e| Error::Config(format!("{name}.wavepacket: {e}")))?;
            }
        }
        site.validate().map_err(|e| Error::Config(format!("{name}: {e}")))?;
    }
    let experiment = ExperimentConfig {
        reflectance: exp.reflectance.unwrap_or(params::DEFAULT_REFLECTANCE),
        polarization: PolarizationConfig::Parallel,
        delta_t: exp.delta_t.unwrap_or(params::DEFAULT_DELTA_T),
        sites,
    };
    experiment.validate().map_err(|e| Error::Config(format!("experiment: {e}")))?;
    let dark_counts = exp.dark_counts.unwrap_or([0.0; DETECTORS]);
    for (d, &p) in dark_counts.iter().enumerate() {
        params::check_probability(&format!("experiment.dark_counts[{d}]"), p)?;
    }
    let config = RunConfig {
        mode: file.mode.unwrap_or(Mode::Compare),
        experiment,
        cos2_eta,
        cos2_eta_source,
        dark_counts,
        sweep: file.sweep,
        output: file.output.unwrap_or_else(|| PathBuf::from("out")),
        seed: file.seed.unwrap_or(DEFAULT_SEED),
        cutoff: file.cutoff.unwrap_or(DEFAULT_CUTOFF),
        n_trials: file.n_trials.unwrap_or(DEFAULT_TRIALS),
        chi_given,
    };
    config.validate()?;
    Ok(config)
}

fn set(slot: &mut f64, value: Option<f64>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn scheme_cos2_eta(s: &SchemeSection) -> Result<(f64, Cos2EtaSource)> {
    let half = |name: &str, x: f64| {
        Half::try_from_f64(x).ok_or_else(|| Error::Config(format!("scheme.{name} = {x} is not a multiple of 1/2")))
    };
    let (fa, fb, fc) = (half("f_a", s.f_a)?, half("f_b", s.f_b)?, half("f_c", s.f_c)?);
    let scheme = match &s.populations {
        Some(p) => LevelScheme::new(fa, fb, fc, p)?,
        None => LevelScheme::unpolarized(fa, fb, fc)?,
    };
    let exact = mixing_angle(&scheme)?;
    Ok((
        ratio_to_f64(&exact),
        Cos2EtaSource::Scheme {
            f_a: s.f_a,
            f_b: s.f_b,
            f_c: s.f_c,
            exact: exact.to_string(),
        },
    ))
}

fn wavepacket(w: &WavepacketSection) -> Result<Wavepacket> {
    match w {
        WavepacketSection::Gaussian { center, width } => Wavepacket::gaussian(*center, *width),
        WavepacketSection::Square { center, width } => Wavepacket::square(*center, *width),
        WavepacketSection::Sampled { start, step, re, im } => {
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            if im.len() != re.len() {
                return Err(Error::Config("re and im must have the same length".into()));
            }
            let samples = re.iter().zip(&im).map(|(&r, &i)| Complex64::new(r, i)).collect();
            Ok(Wavepacket::Sampled(SampledProfile::new(*start, *step, samples)?))
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 2 {
            return Err(Error::Config(format!("cutoff = {} must be at least 2", self.cutoff)));
        }
        if self.n_trials == 0 {
            return Err(Error::Config("n_trials must be at least 1".into()));
        }
        if let Some(s) = &self.sweep {
            s.grid()?;
            if s.parameter == SweepParameter::Reflectance && (s.min < 0.0 || s.max > 1.0) {
                return Err(Error::Config(format!("sweep over reflectance [{}, {}] leaves [0, 1]", s.min, s.max)));
            }
        }
        let provides_chi = matches!(&self.sweep, Some(s) if s.parameter != SweepParameter::Reflectance);
        if !self.chi_given && !provides_chi {
            return Err(Error::Config("missing required key chi (set experiment.chi, site_a.chi and site_b.chi, or sweep over chi or p1)".into()));
        }
        Ok(())
    }

    /// One experiment per sweep point (a single point without a sweep).
    pub fn points(&self) -> Result<Vec<ExperimentConfig>> {
        let Some(spec) = &self.sweep else {
            return Ok(vec![self.experiment.clone()]);
        };
        spec.grid()?
            .into_iter()
            .map(|x| {
                let mut cfg = self.experiment.clone();
                match spec.parameter {
                    SweepParameter::Chi => cfg.sites.iter_mut().for_each(|s| s.chi = x),
                    SweepParameter::Reflectance => cfg.reflectance = x,
                    SweepParameter::P1 => {
                        for s in &mut cfg.sites {
                            if s.epsilon == 0.0 {
                                return Err(Error::Config("a p1 sweep needs nonzero epsilon at both sites".into()));
                            }
                            s.chi = EnsembleParams::chi_for_s2(0.5 * x / s.epsilon, s.cos_eta);
                        }
                    }
                }
                cfg.validate()?;
                Ok(cfg)
            })
            .collect()
    }
}

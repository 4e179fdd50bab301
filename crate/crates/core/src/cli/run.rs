//! Computes every sweep point and renders the CSV files and the report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::config::{Cos2EtaSource, RunConfig};
use crate::analytic::benchmark::SIGNAL_PAIR;
use crate::analytic::params::{EnsembleParams, ExperimentConfig, PolarizationConfig};
use crate::analytic::{predict, RatePrediction, Wavepacket};
use crate::error::{Error, Result};
use crate::fock::experiment_clicks;
use crate::sampler::{sweep, with_dark_counts, Estimate, SweepRow, SweepSettings, MAX_LEAKAGE};

pub const TWO_FOLD_FILE: &str = "two_fold.csv";
pub const FOUR_FOLD_FILE: &str = "four_fold.csv";
pub const REPORT_FILE: &str = "report.txt";

const TWO_FOLD_HEADER: [&str; 5] = ["p1", "ratio_parallel_over_perp", "err", "analytic_ratio", "fock_ratio"];
const FOUR_FOLD_HEADER: [&str; 7] = [
    "p1",
    "R_par_over_Wperp",
    "err",
    "R_perp_over_Wperp",
    "err",
    "analytic_par",
    "analytic_perp",
];

/// Everything computed at one sweep point.
#[derive(Clone, Debug, PartialEq)]
pub struct PointResult {
    pub config: ExperimentConfig,
    pub analytic: Option<RatePrediction>,
    /// Exact engine `P∥(D1 D2) / P⊥(D1 D2)`.
    pub fock_ratio: Option<f64>,
    pub montecarlo: Option<SweepRow>,
}

impl PointResult {
    /// Measured `p1` when Monte Carlo ran, otherwise the analytic value.
    pub fn p1(&self) -> f64 {
        match &self.montecarlo {
            Some(row) => row.p1_hat.value,
            None => crate::analytic::p1(&self.config),
        }
    }

    pub fn analytic_ratio(&self) -> Option<f64> {
        self.analytic.as_ref().map(|a| a.two_fold_parallel / a.two_fold_perp)
    }

    pub fn analytic_four_fold(&self) -> Option<(f64, f64)> {
        self.analytic
            .as_ref()
            .map(|a| (a.four_fold_parallel / a.w_perp, a.four_fold_perp / a.w_perp))
    }
}

/// Exact two-fold ratio from the Fock engine, dark counts folded in.
pub fn fock_two_fold_ratio(config: &ExperimentConfig, cutoff: usize, dark_counts: &[f64]) -> Result<f64> {
    let pair = |pol| -> Result<f64> {
        let dist = experiment_clicks(&config.with_polarization(pol), cutoff)?;
        if dist.leakage > MAX_LEAKAGE {
            return Err(Error::Truncation {
                leakage: dist.leakage,
                limit: MAX_LEAKAGE,
                cutoff,
            });
        }
        let probs = with_dark_counts(&dist.probabilities, dark_counts);
        Ok(probs.iter().enumerate().filter(|(k, _)| k & SIGNAL_PAIR == SIGNAL_PAIR).map(|(_, p)| p).sum())
    };
    Ok(pair(PolarizationConfig::Parallel)? / pair(PolarizationConfig::Perpendicular)?)
}

/// Runs the configured mode over every sweep point, in order of increasing
/// analytic `p1`.
pub fn compute(cfg: &RunConfig) -> Result<Vec<PointResult>> {
    let mut configs = cfg.points()?;
    configs.sort_by(|a, b| crate::analytic::p1(a).total_cmp(&crate::analytic::p1(b)));
    let rows = if cfg.mode.uses_montecarlo() {
        let settings = SweepSettings {
            n_trials: cfg.n_trials,
            seed: cfg.seed,
            cutoff: cfg.cutoff,
            dark_counts: cfg.dark_counts,
        };
        sweep(&configs, &settings)?.into_iter().map(Some).collect()
    } else {
        vec![None; configs.len()]
    };
    configs
        .into_iter()
        .zip(rows)
        .map(|(config, montecarlo)| {
            let analytic = if cfg.mode.uses_analytic() { Some(predict(&config)?) } else { None };
            let fock_ratio = if cfg.mode.uses_fock() {
                Some(fock_two_fold_ratio(&config, cfg.cutoff, &cfg.dark_counts)?)
            } else {
                None
            };
            Ok(PointResult {
                config,
                analytic,
                fock_ratio,
                montecarlo,
            })
        })
        .collect()
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn render_csv<const N: usize>(header: [&str; N], rows: impl Iterator<Item = [String; N]>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is ascii"))
}

pub fn two_fold_csv(points: &[PointResult]) -> Result<String> {
    render_csv(
        TWO_FOLD_HEADER,
        points.iter().map(|p| {
            let mc = p.montecarlo.as_ref().map(|r| r.two_fold_ratio);
            [
                p.p1().to_string(),
                cell(mc.map(|e| e.value)),
                cell(mc.map(|e| e.error)),
                cell(p.analytic_ratio()),
                cell(p.fock_ratio),
            ]
        }),
    )
}

pub fn four_fold_csv(points: &[PointResult]) -> Result<String> {
    render_csv(
        FOUR_FOLD_HEADER,
        points.iter().map(|p| {
            let mc = p.montecarlo.as_ref();
            let analytic = p.analytic_four_fold();
            [
                p.p1().to_string(),
                cell(mc.map(|r| r.par_over_w_perp.value)),
                cell(mc.map(|r| r.par_over_w_perp.error)),
                cell(mc.map(|r| r.perp_over_w_perp.value)),
                cell(mc.map(|r| r.perp_over_w_perp.error)),
                cell(analytic.map(|a| a.0)),
                cell(analytic.map(|a| a.1)),
            ]
        }),
    )
}

fn describe_wavepacket(w: &Wavepacket) -> String {
    match w {
        Wavepacket::Gaussian { center, width } => format!("gaussian, center = {center}, width = {width}"),
        Wavepacket::Square { center, width } => format!("square, center = {center}, width = {width}"),
        Wavepacket::Sampled(_) => {
            let (lo, hi) = w.support();
            format!("sampled on [{lo}, {hi}]")
        }
    }
}

fn echo_site(out: &mut String, name: &str, site: &EnsembleParams, swept: bool) {
    let _ = writeln!(out, "[{name}]");
    if swept {
        let _ = writeln!(out, "chi = (swept)");
    } else {
        let _ = writeln!(out, "chi = {}", site.chi);
    }
    let _ = writeln!(out, "epsilon = {}", site.epsilon);
    let _ = writeln!(out, "retrieval_efficiency = {}", site.retrieval_efficiency);
    let _ = writeln!(out, "idler_epsilon = {}", site.idler_epsilon);
    let _ = writeln!(out, "tau_c = {}", site.tau_c);
    let _ = writeln!(out, "mode_amplitude = {}", site.mode_amplitude);
    let _ = writeln!(out, "wavepacket = {}", describe_wavepacket(&site.wavepacket));
    let _ = writeln!(out);
}

fn max_by<I: Iterator<Item = f64>>(values: I) -> Option<f64> {
    values.filter(|v| !v.is_nan()).reduce(f64::max)
}

/// `|estimate - reference| / err`, or `None` when the estimate carries no
/// usable error bar.
fn pull(estimate: Estimate, reference: f64) -> Option<f64> {
    (estimate.error.is_finite() && estimate.error > 0.0).then(|| (estimate.value - reference).abs() / estimate.error)
}

/// Human-readable summary: the resolved configuration, then one block per
/// point, then the agreement between the computed paths.
pub fn report(cfg: &RunConfig, points: &[PointResult]) -> String {
    use super::config::SweepParameter;
    let mut out = String::new();
    let _ = writeln!(out, "remote-hom run report");
    let _ = writeln!(out);
    let _ = writeln!(out, "mode = {}", cfg.mode.name());
    let _ = writeln!(out, "seed = {}", cfg.seed);
    let _ = writeln!(out, "cutoff = {}", cfg.cutoff);
    let _ = writeln!(out, "n_trials = {}", cfg.n_trials);
    let _ = writeln!(out);
    let exp = &cfg.experiment;
    let _ = writeln!(out, "[experiment]");
    let reflectance_swept = matches!(&cfg.sweep, Some(s) if s.parameter == SweepParameter::Reflectance);
    if reflectance_swept {
        let _ = writeln!(out, "reflectance = (swept)");
    } else {
        let _ = writeln!(out, "reflectance = {}", exp.reflectance);
    }
    let _ = writeln!(out, "delta_t = {}", exp.delta_t);
    let source = match &cfg.cos2_eta_source {
        Cos2EtaSource::Default => "default".to_string(),
        Cos2EtaSource::Given => "given".to_string(),
        Cos2EtaSource::Scheme { f_a, f_b, f_c, exact } => format!("F_a = {f_a}, F_b = {f_b}, F_c = {f_c}: {exact}"),
    };
    let _ = writeln!(out, "cos2_eta = {} ({:.6}, {source})", cfg.cos2_eta, cfg.cos2_eta);
    let d = cfg.dark_counts;
    let _ = writeln!(out, "dark_counts = [{}, {}, {}, {}]", d[0], d[1], d[2], d[3]);
    let _ = writeln!(out);
    let chi_swept = matches!(&cfg.sweep, Some(s) if s.parameter != SweepParameter::Reflectance);
    echo_site(&mut out, "site_a", &exp.sites[0], chi_swept);
    echo_site(&mut out, "site_b", &exp.sites[1], chi_swept);
    match &cfg.sweep {
        Some(s) => {
            let _ = writeln!(out, "[sweep]");
            let _ = writeln!(out, "parameter = {}", s.parameter.name());
            let _ = writeln!(out, "min = {}", s.min);
            let _ = writeln!(out, "max = {}", s.max);
            let _ = writeln!(out, "points = {}", s.points);
            let _ = writeln!(out, "scale = {}", s.scale.name());
        }
        None => {
            let _ = writeln!(out, "[sweep]");
            let _ = writeln!(out, "none");
        }
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "results ({} points, ordered by p1)", points.len());
    for (k, p) in points.iter().enumerate() {
        let _ = writeln!(out);
        let _ = writeln!(out, "point {k}: p1 = {}", p.p1());
        let _ = writeln!(out, "  chi_A = {}, chi_B = {}, reflectance = {}", p.config.sites[0].chi, p.config.sites[1].chi, p.config.reflectance);
        if let Some(row) = &p.montecarlo {
            let r = row.two_fold_ratio;
            let _ = writeln!(out, "  two-fold N12 par/perp (montecarlo) = {} +/- {}", r.value, r.error);
            let _ = writeln!(out, "  two-fold visibility (montecarlo) = {}", 1.0 - r.value);
            let _ = writeln!(
                out,
                "  W_perp (montecarlo) = {} +/- {} ({} of {} paired trials)",
                row.w_perp.value, row.w_perp.error, row.w_perp.hits, row.w_perp.pairs
            );
            let _ = writeln!(
                out,
                "  four-fold R_par/W_perp (montecarlo) = {} +/- {}",
                row.par_over_w_perp.value, row.par_over_w_perp.error
            );
            let _ = writeln!(
                out,
                "  four-fold R_perp/W_perp (montecarlo) = {} +/- {}",
                row.perp_over_w_perp.value, row.perp_over_w_perp.error
            );
            let _ = writeln!(out, "  four-fold visibility (montecarlo) = {}", 1.0 - row.par_over_w_perp.value);
        }
        if let Some(r) = p.analytic_ratio() {
            let _ = writeln!(out, "  two-fold par/perp (analytic) = {r}");
            let _ = writeln!(out, "  two-fold visibility (analytic) = {}", 1.0 - r);
        }
        if let Some((par, perp)) = p.analytic_four_fold() {
            let _ = writeln!(out, "  four-fold R_par/W_perp (analytic) = {par}");
            let _ = writeln!(out, "  four-fold R_perp/W_perp (analytic) = {perp}");
            let _ = writeln!(out, "  four-fold visibility (analytic) = {}", 1.0 - par);
        }
        if let Some(f) = p.fock_ratio {
            let _ = writeln!(out, "  two-fold par/perp (fock) = {f}");
        }
    }

    let _ = writeln!(out);
    let _ = writeln!(out, "agreement");
    let fock_dev = max_by(points.iter().filter_map(|p| Some((p.fock_ratio? / p.analytic_ratio()? - 1.0).abs())));
    let z = |f: &dyn Fn(&PointResult) -> Option<f64>| max_by(points.iter().filter_map(f));
    let z_two = z(&|p| pull(p.montecarlo.as_ref()?.two_fold_ratio, p.analytic_ratio()?));
    let z_par = z(&|p| pull(p.montecarlo.as_ref()?.par_over_w_perp, p.analytic_four_fold()?.0));
    let z_perp = z(&|p| pull(p.montecarlo.as_ref()?.perp_over_w_perp, p.analytic_four_fold()?.1));
    let mut any = false;
    for (label, value) in [
        ("max |fock/analytic - 1| of the two-fold ratio", fock_dev),
        ("max |montecarlo - analytic| / err, two-fold ratio", z_two),
        ("max |montecarlo - analytic| / err, R_par/W_perp", z_par),
        ("max |montecarlo - analytic| / err, R_perp/W_perp", z_perp),
    ] {
        if let Some(v) = value {
            any = true;
            let _ = writeln!(out, "  {label} = {v}");
        }
    }
    if !any {
        let _ = writeln!(out, "  (no pair of computed paths with finite errors to compare)");
    }
    out
}

/// Writes all outputs into `dir`. On failure nothing written by this call is
/// left behind.
pub fn write_outputs(dir: &Path, files: &[(&str, String)]) -> Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    let mut written = Vec::new();
    let result = (|| -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, contents) in files {
            let path = dir.join(name);
            written.push(path.clone());
            std::fs::write(&path, contents)?;
        }
        Ok(())
    })();
    match result {
        Ok(()) => Ok(written),
        Err(e) => {
            remove_outputs(&written);
            if created_dir {
                let _ = std::fs::remove_dir(dir);
            }
            Err(e)
        }
    }
}

fn remove_outputs(paths: &[PathBuf]) {
    for p in paths {
        let _ = std::fs::remove_file(p);
    }
}

/// Computes and writes a full run. Stale outputs from an earlier run are
/// removed if this one fails.
pub fn execute(cfg: &RunConfig) -> Result<Vec<PathBuf>> {
    let rendered = compute(cfg).and_then(|points| {
        Ok(vec![
            (TWO_FOLD_FILE, two_fold_csv(&points)?),
            (FOUR_FOLD_FILE, four_fold_csv(&points)?),
            (REPORT_FILE, report(cfg, &points)),
        ])
    });
    match rendered {
        Ok(files) => write_outputs(&cfg.output, &files),
        Err(e) => {
            remove_outputs(&[TWO_FOLD_FILE, FOUR_FOLD_FILE, REPORT_FILE].map(|f| cfg.output.join(f)));
            Err(e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::config::{parse_config_str, Mode};
    use super::*;

    fn config(mode: &str) -> RunConfig {
        let mut cfg = parse_config_str(&format!(
            "mode = \"{mode}\"\nn_trials = 20000\n[sweep]\nparameter = \"p1\"\nmin = 0.01\nmax = 0.02\npoints = 2\n"
        ))
        .unwrap();
        cfg.output = std::env::temp_dir();
        cfg
    }

    #[test]
    fn analytic_mode_leaves_other_columns_empty() {
        let cfg = config("analytic");
        assert_eq!(cfg.mode, Mode::Analytic);
        let points = compute(&cfg).unwrap();
        let csv = two_fold_csv(&points).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "p1,ratio_parallel_over_perp,err,analytic_ratio,fock_ratio");
        assert_eq!(lines.len(), 3);
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[1], "");
        assert_eq!(cells[4], "");
        let p1: f64 = cells[0].parse().unwrap();
        assert!((p1 - 0.01).abs() < 1e-15);
        let ff = four_fold_csv(&points).unwrap();
        assert!(ff.starts_with("p1,R_par_over_Wperp,err,R_perp_over_Wperp,err,analytic_par,analytic_perp\n"));
    }

    #[test]
    fn fock_ratio_tracks_analytic() {
        let points = compute(&config("fock")).unwrap();
        for p in &points {
            let (f, a) = (p.fock_ratio.unwrap(), p.analytic_ratio().unwrap());
            assert!((f / a - 1.0).abs() < 0.1, "{f} {a}");
        }
    }

    #[test]
    fn small_cutoff_is_refused() {
        let mut cfg = config("fock");
        cfg.cutoff = 4;
        let err = compute(&cfg).unwrap_err();
        assert!(matches!(err, Error::Truncation { cutoff: 4, .. }));
    }

    #[test]
    fn floats_use_shortest_round_trip() {
        assert_eq!(cell(Some(0.1)), "0.1");
        assert_eq!(cell(Some(2.0 / 3.0)), "0.6666666666666666");
        assert_eq!(cell(None), "");
    }

    #[test]
    fn failed_write_cleans_up() {
        let dir = tempfile::tempdir().unwrap();
        let target = dir.path().join("out");
        let files = [("a.txt", "x".to_string()), ("missing/b.txt", "y".to_string())];
        assert!(write_outputs(&target, &files).is_err());
        assert!(!target.exists());
    }
}

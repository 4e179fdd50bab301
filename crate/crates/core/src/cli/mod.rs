//! Command-line front end.

pub mod config;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config, parse_config_str, Mode, RunConfig, Scale, SweepParameter, SweepSpec};
pub use run::{compute, execute, four_fold_csv, report, two_fold_csv, PointResult};

use crate::error::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Simulates remote two-photon interference between atomic-ensemble
/// memories and writes two_fold.csv, four_fold.csv and report.txt.
#[derive(Debug, Parser)]
#[command(name = "remote-hom", version)]
pub struct Args {
    /// TOML configuration file.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Fock-space photon-number cutoff per mode.
    #[arg(long)]
    pub cutoff: Option<usize>,
    /// Monte Carlo trials per scenario and sweep point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
}

/// Loads the configuration file and applies flag overrides.
pub fn resolve(args: &Args) -> Result<RunConfig> {
    let mut cfg = parse_config(&args.config)?;
    if let Some(m) = args.mode {
        cfg.mode = m;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(o) = &args.out {
        cfg.output = o.clone();
    }
    if let Some(c) = args.cutoff {
        cfg.cutoff = c;
    }
    if let Some(n) = args.trials {
        cfg.n_trials = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &Args) -> Result<Vec<PathBuf>> {
    let cfg = resolve(args)?;
    match args.threads {
        Some(0) => Err(Error::Config("--threads must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(|| execute(&cfg)),
        None => execute(&cfg),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_CONFIG,
        Error::Io(_) | Error::Csv(_) => EXIT_IO,
        _ => EXIT_NUMERIC,
    }
}

/// Parses arguments, runs, prints diagnostics and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match run(&args) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

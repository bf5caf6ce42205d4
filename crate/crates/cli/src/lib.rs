//! Command-line front end: configuration files, presets and density sweeps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod reference;
pub mod sweep;

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

pub use config::{parse_config, SweepConfig};
pub use error::CliError;
pub use sweep::{run_sweep, SweepOutput, SweepRow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Expected ARQ delay sweeps over basestation density.
#[derive(Debug, Parser)]
#[command(name = "cellcap", version)]
pub struct Args {
    /// Configuration file (flat key = value).
    #[arg(long, value_name = "PATH", conflicts_with = "preset", required_unless_present = "preset")]
    pub config: Option<PathBuf>,

    /// Built-in figure configuration.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum)]
    pub format: Option<Format>,

    #[arg(long, env = "CELLCAP_SEED")]
    pub seed: Option<u64>,

    #[arg(long, value_name = "N")]
    pub realizations: Option<u64>,

    #[arg(long, value_name = "N")]
    pub tmax: Option<u64>,

    /// Worker threads; results do not depend on it.
    #[arg(long, value_name = "N")]
    pub threads: Option<usize>,
}

/// Loads the configuration named by `args` and applies command-line overrides.
pub fn resolve_config(args: &Args) -> Result<SweepConfig, CliError> {
    let text = match (&args.preset, &args.config) {
        (Some(p), _) => {
            let name = p.to_possible_value().expect("no skipped variants").get_name().to_string();
            config::preset(&name).expect("every preset ships").to_string()
        }
        (None, Some(path)) => {
            fs::read_to_string(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?
        }
        (None, None) => {
            return Err(CliError::Config {
                key: "config".into(),
                reason: "either --config or --preset is required".into(),
            })
        }
    };
    let mut cfg = parse_config(&text)?;
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    if let Some(n) = args.realizations {
        cfg.realizations = n;
    }
    if let Some(t) = args.tmax {
        cfg.tmax = t;
    }
    if let Some(f) = args.format {
        cfg.format = match f {
            Format::Csv => "csv".into(),
            Format::Json => "json".into(),
        };
    }
    cfg.validate()?;
    Ok(cfg)
}

pub fn run(args: &Args) -> Result<(), CliError> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(CliError::Config {
                key: "threads".into(),
                reason: "must be at least 1".into(),
            });
        }
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cfg = resolve_config(args)?;
    eprintln!("# normalized configuration\n{}", cfg.to_toml());
    let out = run_sweep(&cfg)?;
    match &args.out {
        Some(path) => {
            let mut buf = Vec::new();
            out.write(&mut buf)?;
            fs::write(path, buf).map_err(|e| CliError::io(format!("writing {}", path.display()), e))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            out.write(&mut lock)?;
            lock.flush().map_err(|e| CliError::io("writing stdout", e))
        }
    }
}

//! Command-line front end: configures runs, executes relaxations, α sweeps
//! and two-body checks, and writes deterministic CSV/JSON artifacts.

pub mod commands;
pub mod config;
pub mod error;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::RunConfig;
pub use error::{exit, CliError, Result};

#[derive(Debug, Parser)]
#[command(
    name = "frsne",
    version,
    about = "Frictional Schrödinger-Newton laboratory"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Relax an initial state to the stationary state.
    Relax {
        #[command(flatten)]
        common: Common,
    },
    /// Tabulate the effective coupling over a list of coupling phases.
    SweepAlpha {
        #[command(flatten)]
        common: Common,
        /// Comma-separated phases in radians, each in (0, π).
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        alphas: Vec<f64>,
    },
    /// Induced acceleration between two distant bodies in the stationary state.
    Twobody {
        #[command(flatten)]
        common: Common,
        /// Centroid separation in units of ħ²/GM³.
        #[arg(long)]
        separation: f64,
        /// Direction from body 1 to body 2, `x,y,z`; normalized internally.
        #[arg(long, default_value = "1,0,0", allow_hyphen_values = true)]
        direction: String,
        /// Stationary profile written by `relax`; relaxes afresh if absent.
        #[arg(long)]
        profile: Option<PathBuf>,
    },
}

/// Config file plus per-field overrides; flags win over the file.
#[derive(Debug, Clone, Default, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub n_points: Option<usize>,
    #[arg(long)]
    pub r_max: Option<f64>,
    /// Width of the Gaussian initial state.
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub max_time: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
}

impl Common {
    pub fn resolve(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(a) = self.alpha {
            cfg.alpha = a;
        }
        if let Some(n) = self.n_points {
            cfg.n_points = n;
        }
        if let Some(r) = self.r_max {
            cfg.r_max = r;
        }
        if let Some(s) = self.sigma {
            match &mut cfg.initial {
                frsne::InitialCondition::Gaussian { sigma } => *sigma = s,
                _ => {
                    return Err(CliError::field(
                        "sigma",
                        "--sigma applies only to initial = gaussian",
                    ))
                }
            }
        }
        if let Some(t) = self.max_time {
            cfg.max_time = t;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        Ok(cfg)
    }
}

fn parse_vec3(field: &str, raw: &str) -> Result<frsne::Vec3> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    let bad = || CliError::field(field, format!("expected `x,y,z`, got `{raw}`"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = [0.0; 3];
    for (x, p) in v.iter_mut().zip(parts) {
        *x = p.parse().map_err(|_| bad())?;
    }
    Ok(v)
}

/// Runs one subcommand and returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let result = match cli.command {
        Command::Relax { common } => common.resolve().and_then(|c| commands::cmd_relax(&c)),
        Command::SweepAlpha { common, alphas } => common
            .resolve()
            .and_then(|c| commands::cmd_sweep_alpha(&c, &alphas)),
        Command::Twobody {
            common,
            separation,
            direction,
            profile,
        } => common.resolve().and_then(|c| {
            let direction = parse_vec3("direction", &direction)?;
            commands::cmd_twobody(&c, separation, direction, profile.as_deref())
        }),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

//! The three subcommands and their output files.
//!
//! Data files depend only on the configuration; run metadata such as
//! wall-clock time goes to `meta.json`.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use frsne::twobody::{cross_potential_linearization_error, induced_accelerations, SweepStatus};
use frsne::{
    linearized_cross_potential, normalize, phase_profile, relax, sweep_alpha,
    verify_acceleration_identity, AccelerationCheck, BodyState, PhysicsParams, RadialGrid,
    RadialWavefunction, StationaryReport, UnitSystem, Vec3,
};

use crate::config::RunConfig;
use crate::error::{exit, CliError, Result};

pub const SPREAD_VS_TIME: &str = "spread_vs_time.csv";
pub const STATIONARY_PROFILE: &str = "stationary_profile.csv";
pub const REPORT: &str = "report.json";
pub const GEFF_VS_ALPHA: &str = "geff_vs_alpha.csv";
pub const TWOBODY: &str = "twobody.json";
pub const META: &str = "meta.json";

struct Output {
    dir: PathBuf,
}

impl Output {
    fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).map_err(|source| CliError::Write {
            path: dir.to_path_buf(),
            source,
        })?;
        Ok(Self {
            dir: dir.to_path_buf(),
        })
    }

    fn csv<T: Serialize>(&self, name: &str, rows: impl IntoIterator<Item = T>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_path(&path)?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush().map_err(|source| CliError::Write { path, source })
    }

    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(&path, text).map_err(|source| CliError::Write { path, source })
    }

    fn meta(&self, command: &str, cfg: &RunConfig, started: Started, exit_code: u8) -> Result<()> {
        self.json(
            META,
            &Meta {
                command,
                version: env!("CARGO_PKG_VERSION"),
                started_unix_s: started.unix,
                wall_clock_s: started.clock.elapsed().as_secs_f64(),
                exit_code,
                config: cfg,
                config_text: cfg.to_text(),
            },
        )
    }
}

#[derive(Clone, Copy)]
struct Started {
    unix: f64,
    clock: Instant,
}

impl Started {
    fn now() -> Self {
        Self {
            unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0.0, |d| d.as_secs_f64()),
            clock: Instant::now(),
        }
    }
}

#[derive(Serialize)]
struct Meta<'a> {
    command: &'a str,
    version: &'a str,
    started_unix_s: f64,
    wall_clock_s: f64,
    exit_code: u8,
    config: &'a RunConfig,
    config_text: String,
}

#[derive(Serialize)]
struct GridInfo {
    n_points: usize,
    r_max: f64,
}

#[derive(Serialize)]
struct RelaxReport {
    #[serde(flatten)]
    report: StationaryReport,
    units: UnitSystem,
    params: PhysicsParams,
    grid: GridInfo,
}

/// One row of the stationary profile file, in natural units.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProfileRow {
    pub r: f64,
    pub abs_psi_sq: f64,
    /// Unwrapped phase; `NaN` where the amplitude is below the floor.
    pub phase: f64,
}

fn profile_rows(psi: &RadialWavefunction, units: &UnitSystem) -> Result<Vec<ProfileRow>> {
    let chi = phase_profile(psi)?.chi;
    let amp2 = units.amplitude().powi(2);
    Ok(psi
        .grid()
        .nodes()
        .iter()
        .zip(psi.values())
        .zip(chi)
        .map(|((&r, z), phase)| ProfileRow {
            r: r / units.length,
            abs_psi_sq: z.norm_sqr() / amp2,
            phase,
        })
        .collect())
}

/// Rebuilds a normalized state from a stationary profile file.
pub fn read_profile(path: &Path, units: &UnitSystem) -> Result<RadialWavefunction> {
    let bad = |reason: String| CliError::Profile {
        path: path.to_path_buf(),
        reason,
    };
    let mut reader = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let rows: Vec<ProfileRow> = reader
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| bad(e.to_string()))?;
    if rows.len() < frsne::grid::MIN_POINTS {
        return Err(bad(format!("only {} rows", rows.len())));
    }
    let h = 2.0 * rows[0].r;
    for (j, row) in rows.iter().enumerate() {
        let expected = (j as f64 + 0.5) * h;
        if (row.r - expected).abs() > 1e-9 * expected.max(1.0) {
            return Err(bad(format!(
                "row {j}: r = {} is not on the staggered grid (expected {expected})",
                row.r
            )));
        }
    }
    let grid = RadialGrid::new(rows.len(), rows.len() as f64 * h * units.length)?;
    let amp = units.amplitude();
    let values = rows
        .iter()
        .map(|row| {
            let phase = if row.phase.is_finite() {
                row.phase
            } else {
                0.0
            };
            Complex64::from_polar(row.abs_psi_sq.max(0.0).sqrt() * amp, phase)
        })
        .collect();
    Ok(normalize(&RadialWavefunction::new(grid, values)?)?)
}

/// Relaxes the configured initial state; writes the time series, the
/// stationary profile and the report. Exit code 2 when the budget runs out.
pub fn cmd_relax(cfg: &RunConfig) -> Result<u8> {
    let started = Started::now();
    cfg.validate()?;
    let grid = cfg.grid()?;
    let params = cfg.params()?;
    let units = params.units()?;
    let evo = cfg.evolution(&grid, &params)?;
    let run = relax(&cfg.initial, &grid, &params, &evo, &cfg.criterion()?)?;

    let out = Output::create(&cfg.out_dir)?;
    out.csv(SPREAD_VS_TIME, &run.series)?;
    out.csv(STATIONARY_PROFILE, profile_rows(&run.state, &units)?)?;
    out.json(
        REPORT,
        &RelaxReport {
            report: run.report,
            units,
            params,
            grid: GridInfo {
                n_points: grid.n_points(),
                r_max: grid.r_max(),
            },
        },
    )?;
    let code = if run.report.converged {
        exit::SUCCESS
    } else {
        eprintln!(
            "not converged after t = {} (spread fluctuation {:e}, residual {:e})",
            run.report.final_time, run.report.spread_fluctuation, run.report.residual
        );
        exit::NOT_CONVERGED
    };
    out.meta("relax", cfg, started, code)?;
    Ok(code)
}

#[derive(Serialize)]
struct SweepLine {
    alpha: f64,
    r0_measured: f64,
    geff_over_g_measured: f64,
    geff_over_g_constant_r0: f64,
    status: &'static str,
}

/// Relaxes one stationary state per phase and tabulates `G_α/G` with the
/// measured and the constant `R₀`. Exit code 4 if any row went unstable,
/// else 2 if any row did not converge.
pub fn cmd_sweep_alpha(cfg: &RunConfig, alphas: &[f64]) -> Result<u8> {
    let started = Started::now();
    if alphas.is_empty() {
        return Err(CliError::field("alphas", "empty α list"));
    }
    if let Some(a) = alphas
        .iter()
        .find(|a| !(**a > 0.0 && **a < std::f64::consts::PI))
    {
        return Err(CliError::field("alphas", format!("{a} outside (0, π)")));
    }
    cfg.validate()?;
    let rows = sweep_alpha(alphas, &cfg.sweep_settings()?)?;

    let out = Output::create(&cfg.out_dir)?;
    out.csv(
        GEFF_VS_ALPHA,
        rows.iter().map(|r| SweepLine {
            alpha: r.alpha,
            r0_measured: r.r0_measured,
            geff_over_g_measured: r.geff_over_g_measured,
            geff_over_g_constant_r0: r.geff_over_g_constant_r0,
            status: r.status.as_str(),
        }),
    )?;
    let code = if rows.iter().any(|r| r.status == SweepStatus::Unstable) {
        exit::UNSTABLE
    } else if rows.iter().any(|r| r.status == SweepStatus::NotConverged) {
        exit::NOT_CONVERGED
    } else {
        exit::SUCCESS
    };
    for r in rows.iter().filter(|r| r.status != SweepStatus::Converged) {
        eprintln!("α = {}: {}", r.alpha, r.status.as_str());
    }
    out.meta("sweep-alpha", cfg, started, code)?;
    Ok(code)
}

#[derive(Serialize)]
struct TwobodyReport {
    units: UnitSystem,
    params: PhysicsParams,
    separation: f64,
    direction: Vec3,
    profile_converged: bool,
    spread_r0: f64,
    correlation_r0: f64,
    /// Newton force on body 1, in units of `G³M⁸/ħ⁴`.
    force: Vec3,
    cross_potential_offset: f64,
    acceleration_body1: Vec3,
    acceleration_body2: Vec3,
    induced_factor: f64,
    identity: AccelerationCheck,
    identity_residual: f64,
    linearization_rms_error: f64,
}

/// Places body 2 at `separation·direction` from body 1, both in the
/// stationary state, and reports the induced accelerations together with the
/// quadrature check of the acceleration identity.
pub fn cmd_twobody(
    cfg: &RunConfig,
    separation: f64,
    direction: Vec3,
    profile: Option<&Path>,
) -> Result<u8> {
    let started = Started::now();
    if !(separation.is_finite() && separation > 0.0) {
        return Err(CliError::field(
            "separation",
            format!("{separation} must be finite and > 0"),
        ));
    }
    let len = direction.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(len.is_finite() && len > 0.0) {
        return Err(CliError::field(
            "direction",
            "must be a finite nonzero vector",
        ));
    }
    let n = direction.map(|x| x / len);
    let params = cfg.params()?;
    let units = params.units()?;

    let (state, converged) = match profile {
        Some(path) => (read_profile(path, &units)?, true),
        None => {
            cfg.validate()?;
            let grid = cfg.grid()?;
            let evo = cfg.evolution(&grid, &params)?;
            let run = relax(&cfg.initial, &grid, &params, &evo, &cfg.criterion()?)?;
            (run.state, run.report.converged)
        }
    };
    let spread = frsne::spread_r(&state)?;
    let d = separation * units.length;
    let r1 = [0.0; 3];
    let r2 = n.map(|x| x * d);
    let cross = linearized_cross_potential(r1, r2, spread, &params)?;
    let b1 = BodyState::at_rest(r1, state.clone())?;
    let b2 = BodyState::at_rest(r2, state.clone())?;
    let (a1, a2) = induced_accelerations(&b1, &b2, &params)?;
    let identity = verify_acceleration_identity(&state, cross.force, &params)?;
    let r0 = frsne::correlation_r0(&state)?;
    let force_unit = units.energy / units.length;
    let to_natural = |v: Vec3| v.map(|x| x / force_unit);

    let out = Output::create(&cfg.out_dir)?;
    out.json(
        TWOBODY,
        &TwobodyReport {
            units,
            params,
            separation,
            direction: n,
            profile_converged: converged,
            spread_r0: spread / units.length,
            correlation_r0: r0,
            force: to_natural(cross.force),
            cross_potential_offset: cross.offset / units.energy,
            acceleration_body1: to_natural(a1),
            acceleration_body2: to_natural(a2),
            induced_factor: 2.0 * r0,
            identity: AccelerationCheck {
                lhs: to_natural(identity.lhs),
                rhs: to_natural(identity.rhs),
                ..identity
            },
            identity_residual: identity.relative_error,
            linearization_rms_error: cross_potential_linearization_error(&state, d, &params)?
                / units.energy,
        },
    )?;
    let code = if converged {
        exit::SUCCESS
    } else {
        eprintln!("stationary profile did not converge");
        exit::NOT_CONVERGED
    };
    out.meta("twobody", cfg, started, code)?;
    Ok(code)
}

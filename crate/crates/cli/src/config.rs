//! Run configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments and blank lines are ignored
//! n_points = 2000
//! r_max = 40
//! alpha = 1.5707963267948966
//! initial = gaussian
//! sigma = 1
//! out_dir = out
//! ```
//!
//! Every key is optional; missing keys take the defaults, which reproduce the
//! reference runs. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use frsne::twobody::{SweepSettings, REFERENCE_R0};
use frsne::{ConvergenceCriterion, EvolutionConfig, InitialCondition, PhysicsParams, RadialGrid};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n_points: usize,
    pub r_max: f64,
    pub alpha: f64,
    pub hbar: f64,
    pub newton_g: f64,
    pub mass: f64,
    pub stability_factor: f64,
    pub max_steps: u64,
    pub window: f64,
    pub tol_spread: f64,
    pub tol_shape: f64,
    pub max_time: f64,
    pub sample_interval: f64,
    pub initial: InitialCondition,
    /// `R₀` for the constant-`R₀` column of the α sweep.
    pub reference_r0: f64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let crit = ConvergenceCriterion::default();
        Self {
            n_points: 2000,
            r_max: 40.0,
            alpha: FRAC_PI_2,
            hbar: 1.0,
            newton_g: 1.0,
            mass: 1.0,
            stability_factor: frsne::evolution::DEFAULT_STABILITY_FACTOR,
            max_steps: u64::MAX,
            window: crit.window,
            tol_spread: crit.tol_spread,
            tol_shape: crit.tol_shape,
            max_time: crit.max_time,
            sample_interval: crit.sample_interval,
            initial: InitialCondition::default(),
            reference_r0: REFERENCE_R0,
            out_dir: PathBuf::from("out"),
        }
    }
}

const KEYS: &[&str] = &[
    "n_points",
    "r_max",
    "alpha",
    "hbar",
    "newton_g",
    "mass",
    "stability_factor",
    "max_steps",
    "window",
    "tol_spread",
    "tol_shape",
    "max_time",
    "sample_interval",
    "initial",
    "sigma",
    "radius",
    "edge",
    "sigma1",
    "sigma2",
    "weight",
    "reference_r0",
    "out_dir",
];

fn number<T: std::str::FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| CliError::field(key, format!("cannot parse `{raw}`")))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::field(
                    format!("line {}", no + 1),
                    format!("expected `key = value`, got `{line}`"),
                )
            })?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::field(key, "unknown key"));
            }
            if entries.insert(key, value.trim()).is_some() {
                return Err(CliError::field(key, "given more than once"));
            }
        }

        let mut cfg = RunConfig::default();
        for (&key, &raw) in &entries {
            match key {
                "n_points" => cfg.n_points = number(key, raw)?,
                "r_max" => cfg.r_max = number(key, raw)?,
                "alpha" => cfg.alpha = number(key, raw)?,
                "hbar" => cfg.hbar = number(key, raw)?,
                "newton_g" => cfg.newton_g = number(key, raw)?,
                "mass" => cfg.mass = number(key, raw)?,
                "stability_factor" => cfg.stability_factor = number(key, raw)?,
                "max_steps" => cfg.max_steps = number(key, raw)?,
                "window" => cfg.window = number(key, raw)?,
                "tol_spread" => cfg.tol_spread = number(key, raw)?,
                "tol_shape" => cfg.tol_shape = number(key, raw)?,
                "max_time" => cfg.max_time = number(key, raw)?,
                "sample_interval" => cfg.sample_interval = number(key, raw)?,
                "reference_r0" => cfg.reference_r0 = number(key, raw)?,
                "out_dir" => cfg.out_dir = PathBuf::from(raw),
                _ => {}
            }
        }

        let get = |key: &str, default: f64| -> Result<f64> {
            entries.get(key).map_or(Ok(default), |raw| number(key, raw))
        };
        let kind = entries.get("initial").copied().unwrap_or("gaussian");
        let (initial, used): (InitialCondition, &[&str]) = match kind {
            "gaussian" => (
                InitialCondition::Gaussian {
                    sigma: get("sigma", 1.0)?,
                },
                &["sigma"],
            ),
            "smoothed_rectangle" => (
                InitialCondition::SmoothedRectangle {
                    radius: get("radius", 3.0)?,
                    edge: get("edge", 0.5)?,
                },
                &["radius", "edge"],
            ),
            "two_gaussian" => (
                InitialCondition::TwoGaussian {
                    sigma1: get("sigma1", 1.0)?,
                    sigma2: get("sigma2", 3.0)?,
                    weight: get("weight", 1.0)?,
                },
                &["sigma1", "sigma2", "weight"],
            ),
            other => {
                return Err(CliError::field(
                    "initial",
                    format!(
                    "unknown kind `{other}`; expected gaussian, smoothed_rectangle or two_gaussian"
                ),
                ))
            }
        };
        for key in ["sigma", "radius", "edge", "sigma1", "sigma2", "weight"] {
            if entries.contains_key(key) && !used.contains(&key) {
                return Err(CliError::field(
                    key,
                    format!("not used by initial = {kind}"),
                ));
            }
        }
        cfg.initial = initial;
        Ok(cfg)
    }

    /// The file form; [`RunConfig::parse`] restores it exactly.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let mut put = |k: &str, v: &dyn std::fmt::Display| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("n_points", &self.n_points);
        put("r_max", &self.r_max);
        put("alpha", &self.alpha);
        put("hbar", &self.hbar);
        put("newton_g", &self.newton_g);
        put("mass", &self.mass);
        put("stability_factor", &self.stability_factor);
        put("max_steps", &self.max_steps);
        put("window", &self.window);
        put("tol_spread", &self.tol_spread);
        put("tol_shape", &self.tol_shape);
        put("max_time", &self.max_time);
        put("sample_interval", &self.sample_interval);
        match self.initial {
            InitialCondition::Gaussian { sigma } => {
                put("initial", &"gaussian");
                put("sigma", &sigma);
            }
            InitialCondition::SmoothedRectangle { radius, edge } => {
                put("initial", &"smoothed_rectangle");
                put("radius", &radius);
                put("edge", &edge);
            }
            InitialCondition::TwoGaussian {
                sigma1,
                sigma2,
                weight,
            } => {
                put("initial", &"two_gaussian");
                put("sigma1", &sigma1);
                put("sigma2", &sigma2);
                put("weight", &weight);
            }
        }
        put("reference_r0", &self.reference_r0);
        put("out_dir", &self.out_dir.display());
        s
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        if self.n_points < frsne::grid::MIN_POINTS {
            return Err(CliError::field(
                "n_points",
                format!(
                    "{} is below the minimum of {}",
                    self.n_points,
                    frsne::grid::MIN_POINTS
                ),
            ));
        }
        if !(self.r_max.is_finite() && self.r_max > 0.0) {
            return Err(CliError::field(
                "r_max",
                format!("{} must be finite and > 0", self.r_max),
            ));
        }
        Ok(RadialGrid::new(self.n_points, self.r_max)?)
    }

    pub fn params(&self) -> Result<PhysicsParams> {
        let p = PhysicsParams::new(self.hbar, self.newton_g, self.mass, self.alpha)?;
        p.units()?;
        Ok(p)
    }

    pub fn criterion(&self) -> Result<ConvergenceCriterion> {
        let c = ConvergenceCriterion {
            window: self.window,
            tol_spread: self.tol_spread,
            tol_shape: self.tol_shape,
            max_time: self.max_time,
            sample_interval: self.sample_interval,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn evolution(&self, grid: &RadialGrid, params: &PhysicsParams) -> Result<EvolutionConfig> {
        if self.max_steps == 0 {
            return Err(CliError::field("max_steps", "must be at least 1"));
        }
        Ok(EvolutionConfig::new(grid, params, self.stability_factor)
            .map_err(|e| CliError::field("stability_factor", e.to_string()))?
            .with_max_steps(self.max_steps))
    }

    pub fn sweep_settings(&self) -> Result<SweepSettings> {
        if !self.reference_r0.is_finite() {
            return Err(CliError::field("reference_r0", "must be finite"));
        }
        Ok(SweepSettings {
            grid_points: self.n_points,
            r_max: self.r_max,
            params: self.params()?,
            stability_factor: self.stability_factor,
            criterion: self.criterion()?,
            initial: self.initial,
            reference_r0: self.reference_r0,
        })
    }

    /// Checks every field that a relaxation consumes.
    pub fn validate(&self) -> Result<()> {
        let grid = self.grid()?;
        let params = self.params()?;
        self.evolution(&grid, &params)?;
        self.criterion()?;
        self.initial.build(&grid)?;
        if self.out_dir.as_os_str().is_empty() {
            return Err(CliError::field("out_dir", "must not be empty"));
        }
        Ok(())
    }
}

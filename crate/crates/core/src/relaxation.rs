//! Relaxation of an initial wave packet to the stationary state by real-time
//! dissipative evolution.
//!
//! A run is declared converged when, over the trailing window, the relative
//! fluctuation of `Δr` and the rate of change of `|ψ|` both fall below their
//! tolerances. All criterion values are given in natural units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{EvolutionConfig, Propagator};
use crate::grid::RadialGrid;
use crate::observables::{correlation_r0, kinetic_energy, phase_drift_rate, spread_r};
use crate::params::{PhysicsParams, UnitSystem};
use crate::report::{ObservableRecord, StationaryReport};
use crate::wavefunction::{make_gaussian, normalize, RadialWavefunction};

/// Node whose phase is tracked over time.
pub const REFERENCE_NODE: usize = 0;

/// Largest fraction of the norm an initial state may carry beyond `r_max/4`.
const MAX_OUTER_TAIL: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialCondition {
    /// `ψ ∝ exp(−r²/4σ²)`
    Gaussian { sigma: f64 },
    /// `ψ ∝ 1/(1 + exp((r − a)/w))`
    SmoothedRectangle { radius: f64, edge: f64 },
    /// Normalized Gaussians `σ₁` and `σ₂` added with relative weight `weight`.
    TwoGaussian {
        sigma1: f64,
        sigma2: f64,
        weight: f64,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Gaussian { sigma: 1.0 }
    }
}

impl InitialCondition {
    pub fn two_gaussian_default() -> Self {
        InitialCondition::TwoGaussian {
            sigma1: 1.0,
            sigma2: 3.0,
            weight: 1.0,
        }
    }

    /// Real, nonnegative, normalized profile on `grid`.
    pub fn build(&self, grid: &RadialGrid) -> Result<RadialWavefunction> {
        let psi = match *self {
            InitialCondition::Gaussian { sigma } => make_gaussian(grid, sigma)?,
            InitialCondition::SmoothedRectangle { radius, edge } => {
                if !(radius.is_finite() && radius > 0.0) {
                    return Err(Error::param("radius", format!("{radius} must be > 0")));
                }
                if !(edge.is_finite() && edge > 0.0) {
                    return Err(Error::param("edge", format!("{edge} must be > 0")));
                }
                normalize(&RadialWavefunction::from_fn(grid.clone(), |r| {
                    Complex64::new(1.0 / (1.0 + ((r - radius) / edge).exp()), 0.0)
                }))?
            }
            InitialCondition::TwoGaussian {
                sigma1,
                sigma2,
                weight,
            } => {
                if !(weight.is_finite() && weight >= 0.0) {
                    return Err(Error::param("weight", format!("{weight} must be >= 0")));
                }
                let a = make_gaussian(grid, sigma1)?;
                let b = make_gaussian(grid, sigma2)?;
                let values = a
                    .values()
                    .iter()
                    .zip(b.values())
                    .map(|(x, y)| x + y * weight)
                    .collect();
                normalize(&RadialWavefunction::new(grid.clone(), values)?)?
            }
        };
        let quarter = grid.r_max() / 4.0;
        let nodes = grid.nodes();
        let tail = grid.integrate_ball(|j| {
            if nodes[j] > quarter {
                psi.values()[j].norm_sqr()
            } else {
                0.0
            }
        });
        if tail > MAX_OUTER_TAIL {
            return Err(Error::param(
                "initial",
                format!("{tail:.3e} of the norm lies beyond r_max/4; enlarge r_max"),
            ));
        }
        Ok(psi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceCriterion {
    /// Trailing window `T_w`.
    pub window: f64,
    /// Bound on `(max Δr − min Δr) / mean Δr` over the window.
    pub tol_spread: f64,
    /// Bound on `max_j |d|ψ_j|/dt|`.
    pub tol_shape: f64,
    /// Evolution-time budget.
    pub max_time: f64,
    /// Interval between observable samples.
    pub sample_interval: f64,
}

impl Default for ConvergenceCriterion {
    fn default() -> Self {
        Self {
            window: 50.0,
            tol_spread: 1e-4,
            tol_shape: 1e-7,
            max_time: 3000.0,
            sample_interval: 0.5,
        }
    }
}

impl ConvergenceCriterion {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("window", self.window),
            ("tol_spread", self.tol_spread),
            ("tol_shape", self.tol_shape),
            ("max_time", self.max_time),
            ("sample_interval", self.sample_interval),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("{v} must be finite and > 0")));
            }
        }
        if self.sample_interval > self.window {
            return Err(Error::param("sample_interval", "longer than the window"));
        }
        Ok(())
    }
}

/// Outcome of [`relax`]: the final state, its report and the sampled series.
#[derive(Debug, Clone)]
pub struct Relaxation {
    pub state: RadialWavefunction,
    pub report: StationaryReport,
    pub series: Vec<ObservableRecord>,
}

/// Evolves `init` until the convergence criterion holds or the budget runs out.
pub fn relax(
    init: &InitialCondition,
    grid: &RadialGrid,
    params: &PhysicsParams,
    cfg: &EvolutionConfig,
    crit: &ConvergenceCriterion,
) -> Result<Relaxation> {
    relax_from(&init.build(grid)?, params, cfg, crit)
}

fn record(
    psi: &RadialWavefunction,
    params: &PhysicsParams,
    units: &UnitSystem,
    time: f64,
) -> Result<ObservableRecord> {
    let norm_sq = psi.norm_sq();
    let unit = normalize(psi)?;
    let e = kinetic_energy(&unit, params)?;
    Ok(ObservableRecord {
        time: time / units.time,
        norm_sq,
        spread_r: spread_r(&unit)? / units.length,
        spread_p: (2.0 * params.mass * e).sqrt() / units.momentum,
        kinetic_energy: e / units.energy,
        phase_at_ref: psi.values()[REFERENCE_NODE].arg(),
    })
}

/// Same as [`relax`], starting from an arbitrary normalized state.
pub fn relax_from(
    init: &RadialWavefunction,
    params: &PhysicsParams,
    cfg: &EvolutionConfig,
    crit: &ConvergenceCriterion,
) -> Result<Relaxation> {
    crit.validate()?;
    let units = params.units()?;
    let grid = init.grid().clone();
    cfg.validate(&grid, params)?;

    // an integer number of steps per sample
    let sample_dt = crit.sample_interval * units.time;
    let per_sample = (sample_dt / cfg.dt).ceil().max(1.0) as u64;
    let cfg = EvolutionConfig {
        dt: sample_dt / per_sample as f64,
        ..*cfg
    };
    let window_samples = (crit.window / crit.sample_interval).round() as usize;
    let max_samples = (crit.max_time / crit.sample_interval).ceil() as usize;
    let rate_scale = units.time / units.amplitude() / sample_dt;

    let mut prop = Propagator::new(init, params, &cfg)?;
    let mut series = vec![record(init, params, &units, 0.0)?];
    let mut moduli = init.moduli();
    let mut residual = f64::INFINITY;
    let mut fluctuation = f64::INFINITY;
    let mut converged = false;

    for _ in 0..max_samples {
        if prop.steps() + per_sample > cfg.max_steps {
            break;
        }
        prop.advance(per_sample)?;
        let psi = prop.state();
        residual = psi
            .values()
            .iter()
            .zip(&moduli)
            .map(|(z, m)| (z.norm() - m).abs())
            .fold(0.0, f64::max)
            * rate_scale;
        moduli = psi.moduli();
        series.push(record(&psi, params, &units, prop.time())?);

        if series.len() > window_samples {
            let tail = &series[series.len() - window_samples - 1..];
            let (lo, hi, sum) = tail
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY, 0.0), |(lo, hi, s), r| {
                    (lo.min(r.spread_r), hi.max(r.spread_r), s + r.spread_r)
                });
            fluctuation = (hi - lo) / (sum / tail.len() as f64);
            if fluctuation < crit.tol_spread && residual < crit.tol_shape {
                converged = true;
                break;
            }
        }
    }

    let state = normalize(&prop.state())?;
    let e = kinetic_energy(&state, params)?;
    let drift_samples: Vec<(f64, f64)> = series[series.len().saturating_sub(window_samples + 1)..]
        .iter()
        .map(|r| (r.time, r.phase_at_ref))
        .collect();
    let phase_drift = phase_drift_rate(&drift_samples).unwrap_or(f64::NAN);
    let report = StationaryReport {
        spread_r0: spread_r(&state)? / units.length,
        energy_e0: e / units.energy,
        spread_p0: (2.0 * params.mass * e).sqrt() / units.momentum,
        correlation_r0: correlation_r0(&state)?,
        phase_drift,
        converged,
        iterations: prop.steps(),
        residual,
        spread_fluctuation: fluctuation,
        final_time: prop.time() / units.time,
    };
    Ok(Relaxation {
        state,
        report,
        series,
    })
}

/// `max_j ||a_j| − |b_j||`, blind to the phase.
pub fn shape_distance(a: &RadialWavefunction, b: &RadialWavefunction) -> Result<f64> {
    a.grid().ensure_same(b.grid(), "shape distance")?;
    Ok(a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x.norm() - y.norm()).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use std::f64::consts::PI;

    fn reference() -> RadialGrid {
        make_grid(2000, 40.0).unwrap()
    }

    #[test]
    fn shape_distance_basics() {
        let g = reference();
        let a = make_gaussian(&g, 1.0).unwrap();
        assert_eq!(shape_distance(&a, &a).unwrap(), 0.0);
        assert!(shape_distance(&a, &a.with_global_phase(2.0)).unwrap() < 1e-15);
        // peaks (2π)^{-3/4} (1 − 2^{-3/2}) apart
        let b = make_gaussian(&g, 2.0).unwrap();
        let d = shape_distance(&a, &b).unwrap();
        let peak_gap = (2.0 * PI).powf(-0.75) * (1.0 - 2f64.powf(-1.5));
        assert!(d > 0.05);
        assert!((d - peak_gap).abs() < 1e-3, "{d} vs {peak_gap}");
        let c = make_gaussian(&make_grid(1000, 40.0).unwrap(), 1.0).unwrap();
        assert!(shape_distance(&a, &c).is_err());
    }

    #[test]
    fn initial_conditions_are_normalized_real_and_contained() {
        let g = reference();
        for ic in [
            InitialCondition::Gaussian { sigma: 1.0 },
            InitialCondition::SmoothedRectangle {
                radius: 3.0,
                edge: 0.5,
            },
            InitialCondition::two_gaussian_default(),
        ] {
            let psi = ic.build(&g).unwrap();
            assert!((psi.norm_sq() - 1.0).abs() < 1e-12);
            assert!(psi.values().iter().all(|z| z.im == 0.0 && z.re >= 0.0));
        }
        let wide = InitialCondition::SmoothedRectangle {
            radius: 12.0,
            edge: 0.5,
        };
        assert!(wide.build(&g).is_err());
        assert!(InitialCondition::Gaussian { sigma: -1.0 }
            .build(&g)
            .is_err());
        let neg = InitialCondition::TwoGaussian {
            sigma1: 1.0,
            sigma2: 2.0,
            weight: -1.0,
        };
        assert!(neg.build(&g).is_err());
    }

    #[test]
    fn criterion_validation() {
        assert!(ConvergenceCriterion::default().validate().is_ok());
        let bad = ConvergenceCriterion {
            tol_shape: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    fn coarse_run(alpha: f64, max_time: f64) -> Relaxation {
        let g = make_grid(250, 40.0).unwrap();
        let p = PhysicsParams::natural(alpha).unwrap();
        let cfg = EvolutionConfig::with_default_factor(&g, &p).unwrap();
        let crit = ConvergenceCriterion {
            max_time,
            ..Default::default()
        };
        relax(&InitialCondition::default(), &g, &p, &cfg, &crit).unwrap()
    }

    #[test]
    fn coarse_relaxation_reaches_the_stationary_state() {
        let run = coarse_run(PI / 2.0, 3000.0);
        let rep = run.report;
        assert!(rep.converged, "{rep:?}");
        assert!(rep.residual < 1e-7 && rep.spread_fluctuation < 1e-4);
        assert!((rep.spread_r0 - 5.5501).abs() < 0.01 * 5.5501, "{rep:?}");
        assert!((rep.phase_drift + rep.energy_e0).abs() < 0.02 * rep.energy_e0);
        // sampled every 0.5
        assert!((run.series[1].time - 0.5).abs() < 1e-12);
        assert!(run.series.iter().all(|r| (r.norm_sq - 1.0).abs() < 1e-12));

        // the Δr oscillation range shrinks over the last windows
        let per = 100;
        let ranges: Vec<f64> = run.series[run.series.len() - 5 * per..]
            .chunks(per)
            .map(|c| {
                let (lo, hi) = c
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                        (lo.min(r.spread_r), hi.max(r.spread_r))
                    });
                hi - lo
            })
            .collect();
        assert!(ranges.windows(2).all(|w| w[1] < w[0]), "{ranges:?}");
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let run = coarse_run(0.0, 200.0);
        assert!(!run.report.converged);
        assert!((run.report.final_time - 200.0).abs() < 1e-9);
        assert_eq!(run.series.len(), 401);
    }

    #[test]
    fn max_steps_caps_the_run() {
        let g = make_grid(250, 40.0).unwrap();
        let p = PhysicsParams::default();
        let cfg = EvolutionConfig::with_default_factor(&g, &p)
            .unwrap()
            .with_max_steps(1000);
        let run = relax(
            &InitialCondition::default(),
            &g,
            &p,
            &cfg,
            &ConvergenceCriterion::default(),
        )
        .unwrap();
        assert!(!run.report.converged);
        assert!(run.report.iterations <= 1000);
    }
}

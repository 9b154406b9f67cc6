//! Far-separation two-body reduction.
//!
//! Two bodies in their stationary one-body states, far apart compared with
//! their spread, feel each other only through the linearized cross mean
//! field. With purely imaginary coupling that field does not act as a force,
//! yet it accelerates each centroid by `dp̄₁/dt = 2R₀F`, where `F` is the
//! Newton force and `R₀` the correlation scalar of the stationary state. For
//! the general coupling `G·e^(−iα)` real dynamics and induced acceleration
//! combine into the effective coupling `G_α = (cos α + 2R₀ sin α)·G`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::EvolutionConfig;
use crate::grid::RadialGrid;
use crate::meanfield::compute_potential;
use crate::observables::{correlation_matrix_isotropy, correlation_r0, phase_profile};
use crate::params::PhysicsParams;
use crate::relaxation::{relax, ConvergenceCriterion, InitialCondition};
use crate::report::StationaryReport;
use crate::wavefunction::RadialWavefunction;

pub type Vec3 = [f64; 3];

/// Separation, in units of the body spread, below which the linearized
/// cross potential is refused.
pub const MIN_SEPARATION_RATIO: f64 = 10.0;

fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: Vec3, s: f64) -> Vec3 {
    a.map(|x| x * s)
}

fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

/// A body in the product ansatz: centroid, momentum and the c.o.m.-frame
/// radial profile.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyState {
    pub centroid: Vec3,
    pub momentum: Vec3,
    pub profile: RadialWavefunction,
}

impl BodyState {
    pub fn new(centroid: Vec3, momentum: Vec3, profile: RadialWavefunction) -> Result<Self> {
        profile.ensure_normalized()?;
        Ok(Self {
            centroid,
            momentum,
            profile,
        })
    }

    pub fn at_rest(centroid: Vec3, profile: RadialWavefunction) -> Result<Self> {
        Self::new(centroid, [0.0; 3], profile)
    }
}

/// Newton force on body 1 exerted by body 2: `GM²(r₂ − r₁)/|r₁ − r₂|³`.
pub fn newton_force(r1: Vec3, r2: Vec3, params: &PhysicsParams) -> Result<Vec3> {
    let d = sub(r2, r1);
    let dist = norm(d);
    if dist == 0.0 {
        return Err(Error::CoincidentBodies);
    }
    Ok(scale(d, params.gm2() / dist.powi(3)))
}

/// Linear expansion of the cross mean field around body 1's centroid:
/// `V(r₁) ≈ offset − force·(r₁ − r̄₁)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrossPotential {
    /// `V^(12)(r̄₁) = −GM²/d`
    pub offset: f64,
    /// `F`, minus the gradient of the cross potential.
    pub force: Vec3,
}

impl CrossPotential {
    pub fn gradient(&self) -> Vec3 {
        scale(self.force, -1.0)
    }
}

/// Refuses separations with `d / (Δr)₀ ≤ 10`, where the expansion is invalid.
pub fn linearized_cross_potential(
    r1: Vec3,
    r2: Vec3,
    body_spread: f64,
    params: &PhysicsParams,
) -> Result<CrossPotential> {
    let d = norm(sub(r2, r1));
    let ratio = d / body_spread;
    // NaN ratios are refused too
    if ratio.is_nan() || ratio <= MIN_SEPARATION_RATIO {
        return Err(Error::SeparationTooSmall {
            ratio,
            min: MIN_SEPARATION_RATIO,
        });
    }
    Ok(CrossPotential {
        offset: -params.gm2() / d,
        force: newton_force(r1, r2, params)?,
    })
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let k = k as f64;
                    let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Product rule on the unit sphere: Gauss–Legendre in `cos θ` times a
/// uniform azimuthal grid. Returns `(n, weight)` with weights summing to 4π.
fn sphere_rule(n_polar: usize, n_azimuth: usize) -> Vec<(Vec3, f64)> {
    let mut out = Vec::with_capacity(n_polar * n_azimuth);
    for (mu, w) in gauss_legendre(n_polar) {
        let s = (1.0 - mu * mu).sqrt();
        for k in 0..n_azimuth {
            let phi = 2.0 * PI * (k as f64 + 0.5) / n_azimuth as f64;
            out.push((
                [s * phi.cos(), s * phi.sin(), mu],
                w * 2.0 * PI / n_azimuth as f64,
            ));
        }
    }
    out
}

/// RMS, over body 1's density, of the difference between the exact cross
/// potential of a second identical body at distance `d` and its linearization.
///
/// The exact potential follows from the shell theorem applied to body 2's
/// radial density; it is `−GM²/s` once `s` lies beyond body 2's grid.
pub fn cross_potential_linearization_error(
    profile: &RadialWavefunction,
    separation: f64,
    params: &PhysicsParams,
) -> Result<f64> {
    let pot = compute_potential(profile, params)?;
    let grid = profile.grid();
    let h = grid.spacing();
    let nodes = grid.nodes();
    let gm2 = params.gm2();
    let exact = |s: f64| -> f64 {
        if s >= grid.r_max() {
            return -gm2 / s;
        }
        let x = (s / h - 0.5).clamp(0.0, (nodes.len() - 1) as f64);
        let i = (x.floor() as usize).min(nodes.len() - 2);
        let t = x - i as f64;
        pot.values[i] * (1.0 - t) + pot.values[i + 1] * t
    };
    let d = separation;
    let rule = gauss_legendre(32);
    let mut acc = 0.0;
    for (j, &r) in nodes.iter().enumerate() {
        let rho = profile.values()[j].norm_sqr();
        if rho == 0.0 {
            continue;
        }
        // body 2 on the z axis; the integrand depends on μ = cos θ only
        let ang: f64 = rule
            .iter()
            .map(|&(mu, w)| {
                let s = (d * d - 2.0 * d * r * mu + r * r).sqrt();
                let lin = -gm2 / d - gm2 * r * mu / (d * d);
                w * (exact(s) - lin).powi(2)
            })
            .sum();
        acc += 2.0 * PI * ang * rho * r * r * h;
    }
    Ok(acc.sqrt())
}

/// `dp̄₁/dt = 2R₀F`.
pub fn induced_acceleration(profile: &RadialWavefunction, force: Vec3) -> Result<Vec3> {
    let r0 = correlation_r0(profile)?;
    Ok(scale(force, 2.0 * r0))
}

/// Induced accelerations of both bodies from their mutual Newton force.
pub fn induced_accelerations(
    a: &BodyState,
    b: &BodyState,
    params: &PhysicsParams,
) -> Result<(Vec3, Vec3)> {
    let f = newton_force(a.centroid, b.centroid, params)?;
    Ok((
        induced_acceleration(&a.profile, f)?,
        induced_acceleration(&b.profile, scale(f, -1.0))?,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccelerationCheck {
    /// Real part of the centroid momentum rate from the effective equation.
    pub lhs: Vec3,
    /// `2 R·F` with the correlation matrix `R`.
    pub rhs: Vec3,
    pub relative_error: f64,
    /// `|Im lhs| / |F|`; vanishes in the continuum, `O(h²)` on the grid.
    pub imaginary_residual: f64,
}

/// Evaluates the centroid momentum rate
/// `−iħ ∫ [ψ* ∇(dψ/dt) + (dψ/dt)* ∇ψ] d³r` with `dψ/dt = (1/ħ) F·r ψ` directly
/// as a three-dimensional quadrature (radial nodes times a spherical product
/// rule), and compares it with `2R·F`.
///
/// The gradient is taken in polar form, `ψ′ = (|ψ|′ + i|ψ|χ′) e^{iχ}`, so the
/// left side is built from `|ψ|`, `χ′` and `r` alone.
pub fn verify_acceleration_identity(
    profile: &RadialWavefunction,
    force: Vec3,
    params: &PhysicsParams,
) -> Result<AccelerationCheck> {
    profile.ensure_normalized()?;
    let grid = profile.grid();
    let (h, nodes) = (grid.spacing(), grid.nodes());
    let hbar = params.hbar;
    let values = profile.values();
    let n = values.len();

    let prof = phase_profile(profile)?;
    let dchi = prof.derivative();
    let modulus: Vec<f64> = values.iter().map(|z| z.norm()).collect();
    let dmod: Vec<f64> = (0..n)
        .map(|j| match j {
            0 => (modulus[1] - modulus[0]) / h,
            _ if j + 1 == n => (modulus[n - 1] - modulus[n - 2]) / h,
            _ => (modulus[j + 1] - modulus[j - 1]) / (2.0 * h),
        })
        .collect();

    let rule = sphere_rule(8, 16);
    let mut lhs = [Complex64::default(); 3];
    for j in 0..n {
        let r = nodes[j];
        let psi = values[j];
        let chi_p = if dchi[j].is_finite() { dchi[j] } else { 0.0 };
        let dpsi =
            Complex64::new(dmod[j], modulus[j] * chi_p) * Complex64::from_polar(1.0, psi.arg());
        for &(nv, w) in &rule {
            let x = scale(nv, r);
            let g = dot(force, x) / hbar;
            let dw = w * r * r * h;
            for a in 0..3 {
                // ψ* ∇_a(gψ) + (gψ)* ∇_a ψ,  ∇_a g = F_a/ħ
                let term = psi.conj() * (psi * (force[a] / hbar) + dpsi * (g * nv[a]))
                    + (psi * g).conj() * dpsi * nv[a];
                lhs[a] += Complex64::new(0.0, -hbar) * term * dw;
            }
        }
    }

    let m = correlation_matrix_isotropy(profile)?;
    let rhs: Vec3 = std::array::from_fn(|a| 2.0 * (0..3).map(|b| m[a][b] * force[b]).sum::<f64>());
    let re: Vec3 = lhs.map(|z| z.re);
    let im: Vec3 = lhs.map(|z| z.im);
    let diff = norm(sub(re, rhs));
    let size = norm(rhs).max(norm(re));
    let relative_error = if size == 0.0 { 0.0 } else { diff / size };
    let fmag = norm(force);
    Ok(AccelerationCheck {
        lhs: re,
        rhs,
        relative_error,
        imaginary_residual: if fmag == 0.0 {
            norm(im)
        } else {
            norm(im) / fmag
        },
    })
}

/// `G_α = (cos α + 2R₀ sin α)·G`.
pub fn effective_coupling(alpha: f64, r0: f64, params: &PhysicsParams) -> f64 {
    (alpha.cos() + 2.0 * r0 * alpha.sin()) * params.newton_g
}

/// Location `arctan(2R₀)` and height `sqrt(1 + 4R₀²)` of the maximum of
/// `G_α/G` over `α`.
pub fn effective_coupling_peak(r0: f64) -> (f64, f64) {
    ((2.0 * r0).atan(), (1.0 + 4.0 * r0 * r0).sqrt())
}

/// Correlation scalar of the stationary state at `α = π/2`, used for the
/// constant-`R₀` effective-coupling curve.
pub const REFERENCE_R0: f64 = 0.6753;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSettings {
    pub grid_points: usize,
    pub r_max: f64,
    /// `ħ`, `G`, `M`; the phase is overridden per row.
    pub params: PhysicsParams,
    pub stability_factor: f64,
    pub criterion: ConvergenceCriterion,
    pub initial: InitialCondition,
    pub reference_r0: f64,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            grid_points: 2000,
            r_max: 40.0,
            params: PhysicsParams::default(),
            stability_factor: crate::evolution::DEFAULT_STABILITY_FACTOR,
            criterion: ConvergenceCriterion::default(),
            initial: InitialCondition::default(),
            reference_r0: REFERENCE_R0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepStatus {
    Converged,
    NotConverged,
    Unstable,
}

impl SweepStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepStatus::Converged => "converged",
            SweepStatus::NotConverged => "not_converged",
            SweepStatus::Unstable => "unstable",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    pub r0_measured: f64,
    pub geff_over_g_measured: f64,
    pub geff_over_g_constant_r0: f64,
    pub status: SweepStatus,
    pub report: Option<StationaryReport>,
}

/// Relaxes the stationary state for every `α`, measures `R₀(α)` and tabulates
/// `G_α/G` with both the measured and the constant `R₀`. Rows come back in
/// input order; runs execute in parallel.
pub fn sweep_alpha(alphas: &[f64], settings: &SweepSettings) -> Result<Vec<SweepRow>> {
    if alphas.is_empty() {
        return Err(Error::param("alphas", "empty α list"));
    }
    for &a in alphas {
        if !(a > 0.0 && a < PI) {
            return Err(Error::param("alphas", format!("{a} outside (0, π)")));
        }
    }
    let grid = RadialGrid::new(settings.grid_points, settings.r_max)?;
    settings.criterion.validate()?;
    settings.initial.build(&grid)?;

    alphas
        .par_iter()
        .map(|&alpha| {
            let params = settings.params.with_alpha(alpha)?;
            let cfg = EvolutionConfig::new(&grid, &params, settings.stability_factor)?;
            let constant =
                effective_coupling(alpha, settings.reference_r0, &params) / params.newton_g;
            let row = match relax(&settings.initial, &grid, &params, &cfg, &settings.criterion) {
                Ok(run) => {
                    let r0 = run.report.correlation_r0;
                    SweepRow {
                        alpha,
                        r0_measured: r0,
                        geff_over_g_measured: effective_coupling(alpha, r0, &params)
                            / params.newton_g,
                        geff_over_g_constant_r0: constant,
                        status: if run.report.converged {
                            SweepStatus::Converged
                        } else {
                            SweepStatus::NotConverged
                        },
                        report: Some(run.report),
                    }
                }
                Err(Error::Unstable { .. }) => SweepRow {
                    alpha,
                    r0_measured: f64::NAN,
                    geff_over_g_measured: f64::NAN,
                    geff_over_g_constant_r0: constant,
                    status: SweepStatus::Unstable,
                    report: None,
                },
                Err(e) => return Err(e),
            };
            Ok(row)
        })
        .collect()
}

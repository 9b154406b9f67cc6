//! Scalar diagnostics of a radial state: norm, standard spread, kinetic
//! energy, momentum spread, phase profile and the position–momentum
//! correlation scalar `R₀`.
//!
//! All integrals use the midpoint rule `4π Σ f(r_j) r_j² h` of the grid;
//! derivatives are second-order centered differences, one-sided at the ends.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::params::PhysicsParams;
use crate::wavefunction::RadialWavefunction;

/// Nodes whose modulus falls below this fraction of the peak are excluded
/// from the phase profile.
pub const AMPLITUDE_FLOOR: f64 = 1e-10;

pub fn norm_sq(psi: &RadialWavefunction) -> f64 {
    psi.norm_sq()
}

/// Standard spread `Δr = sqrt((4π/3) ∫ |ψ|² r⁴ dr)`, i.e. `sqrt(⟨r²⟩/3)`.
pub fn spread_r(psi: &RadialWavefunction) -> Result<f64> {
    psi.ensure_normalized()?;
    let nodes = psi.grid().nodes();
    let m2 = psi
        .grid()
        .integrate_ball(|j| psi.values()[j].norm_sqr() * nodes[j] * nodes[j]);
    Ok((m2 / 3.0).sqrt())
}

fn centered<T>(f: &[T], h: f64) -> Vec<T>
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Div<f64, Output = T>,
{
    let n = f.len();
    (0..n)
        .map(|j| match j {
            0 => (f[1] - f[0]) / h,
            _ if j + 1 == n => (f[n - 1] - f[n - 2]) / h,
            _ => (f[j + 1] - f[j - 1]) / (2.0 * h),
        })
        .collect()
}

/// `E = (ħ²/2M) ∫ |ψ′|² 4πr² dr`.
pub fn kinetic_energy(psi: &RadialWavefunction, params: &PhysicsParams) -> Result<f64> {
    if psi.grid().n_points() < 3 {
        return Err(Error::InvalidGrid(
            "kinetic energy needs at least 3 nodes".into(),
        ));
    }
    psi.ensure_normalized()?;
    let d = centered(psi.values(), psi.grid().spacing());
    let grad2 = psi.grid().integrate_ball(|j| d[j].norm_sqr());
    Ok(params.hbar * params.hbar / (2.0 * params.mass) * grad2)
}

/// Total momentum spread `sqrt(⟨p²⟩) = sqrt(2M·E)`; `⟨p⟩ = 0` by symmetry.
pub fn spread_p(psi: &RadialWavefunction, params: &PhysicsParams) -> Result<f64> {
    Ok((2.0 * params.mass * kinetic_energy(psi, params)?).sqrt())
}

/// Unwrapped phase `χ(r) = arg ψ(r)` on the contiguous region, starting at
/// the innermost node, where `|ψ|` exceeds the amplitude floor.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseProfile {
    pub grid: RadialGrid,
    /// `NaN` outside `region`.
    pub chi: Vec<f64>,
    /// Node range `[start, end)` covered by the unwrapped phase.
    pub region: (usize, usize),
}

impl PhaseProfile {
    /// Centered-difference `χ′` on the region (one-sided at its ends), `NaN`
    /// elsewhere.
    pub fn derivative(&self) -> Vec<f64> {
        let (a, b) = self.region;
        let mut out = vec![f64::NAN; self.chi.len()];
        if b - a >= 2 {
            out[a..b].copy_from_slice(&centered(&self.chi[a..b], self.grid.spacing()));
        } else {
            out[a] = 0.0;
        }
        out
    }
}

pub fn phase_profile(psi: &RadialWavefunction) -> Result<PhaseProfile> {
    let v = psi.values();
    let peak = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if !(peak.is_finite() && peak > 0.0) {
        return Err(Error::PhaseUnwrap("no amplitude above the floor".into()));
    }
    let floor = AMPLITUDE_FLOOR * peak;
    let start = v
        .iter()
        .position(|z| z.norm() >= floor)
        .ok_or_else(|| Error::PhaseUnwrap("no amplitude above the floor".into()))?;
    let end = v[start..]
        .iter()
        .position(|z| z.norm() < floor)
        .map_or(v.len(), |k| start + k);

    let mut chi = vec![f64::NAN; v.len()];
    chi[start] = v[start].arg();
    for j in start + 1..end {
        // arg(ψ_j ψ*_{j−1}) ∈ (−π, π] is the wrapped increment
        let step = (v[j] * v[j - 1].conj()).arg();
        if !step.is_finite() {
            return Err(Error::PhaseUnwrap(format!(
                "non-finite amplitude at node {j}"
            )));
        }
        chi[j] = chi[j - 1] + step;
    }
    Ok(PhaseProfile {
        grid: psi.grid().clone(),
        chi,
        region: (start, end),
    })
}

/// `∫ r³ |ψ|² χ′ dr` over the phase region.
fn phase_moment(psi: &RadialWavefunction) -> Result<f64> {
    psi.ensure_normalized()?;
    let prof = phase_profile(psi)?;
    let dchi = prof.derivative();
    let (a, b) = prof.region;
    let nodes = psi.grid().nodes();
    let h = psi.grid().spacing();
    Ok(h * (a..b)
        .map(|j| nodes[j].powi(3) * psi.values()[j].norm_sqr() * dchi[j])
        .sum::<f64>())
}

/// Correlation scalar `R₀ = (4π/3) ∫ r³ |ψ|² χ′ dr`, the isotropic value of
/// `Re(⟨p∘r⟩ − ⟨p⟩∘⟨r⟩)/ħ` for a spherical state. Dimensionless.
pub fn correlation_r0(psi: &RadialWavefunction) -> Result<f64> {
    Ok(4.0 * PI / 3.0 * phase_moment(psi)?)
}

/// Second angular moments `⟨n_a n_b⟩` over the unit sphere, from the
/// six-point octahedral rule (exact through degree three).
pub(crate) fn angular_second_moments() -> [[f64; 3]; 3] {
    let mut m = [[0.0; 3]; 3];
    for axis in 0..3 {
        for sign in [1.0, -1.0] {
            let mut n = [0.0; 3];
            n[axis] = sign;
            for a in 0..3 {
                for b in 0..3 {
                    m[a][b] += n[a] * n[b] / 6.0;
                }
            }
        }
    }
    m
}

/// The full 3×3 correlation matrix of a spherical state.
///
/// `R_ab = ∫ |ψ|² χ′(r) x_a x_b / r d³r`; the angular factor `⟨n_a n_b⟩` is
/// integrated separately from the radial moment `4π ∫ r³ |ψ|² χ′ dr`.
pub fn correlation_matrix_isotropy(psi: &RadialWavefunction) -> Result<[[f64; 3]; 3]> {
    let radial = 4.0 * PI * phase_moment(psi)?;
    let ang = angular_second_moments();
    Ok(ang.map(|row| row.map(|m| m * radial)))
}

/// Least-squares slope of the unwrapped phase series `(t_k, arg ψ(t_k))`.
pub fn phase_drift_rate(samples: &[(f64, f64)]) -> Result<f64> {
    const MIN_SAMPLES: usize = 10;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_SAMPLES,
            got: samples.len(),
        });
    }
    let mut unwrapped = Vec::with_capacity(samples.len());
    let mut prev = samples[0].1;
    let mut acc = prev;
    for &(t, phi) in samples {
        let d = phi - prev;
        acc += d - 2.0 * PI * (d / (2.0 * PI)).round();
        prev = phi;
        unwrapped.push((t, acc));
    }
    let n = unwrapped.len() as f64;
    let (mt, mp) = unwrapped
        .iter()
        .fold((0.0, 0.0), |(a, b), &(t, p)| (a + t / n, b + p / n));
    let (sxy, sxx) = unwrapped.iter().fold((0.0, 0.0), |(sxy, sxx), &(t, p)| {
        (sxy + (t - mt) * (p - mp), sxx + (t - mt) * (t - mt))
    });
    if sxx <= 0.0 {
        return Err(Error::param("samples", "all sample times coincide"));
    }
    Ok(sxy / sxx)
}

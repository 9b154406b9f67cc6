use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Spherically symmetric one-body state `ψ(r)` sampled on a [`RadialGrid`].
/// Amplitudes carry dimension `length^(−3/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialWavefunction {
    grid: RadialGrid,
    values: Vec<Complex64>,
}

impl RadialWavefunction {
    pub fn new(grid: RadialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.n_points() {
            return Err(Error::GridMismatch(format!(
                "{} amplitudes for a grid of {} nodes",
                values.len(),
                grid.n_points()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// `4π Σ |ψ_j|² r_j² h`
    pub fn norm_sq(&self) -> f64 {
        self.grid.integrate_ball(|j| self.values[j].norm_sqr())
    }

    /// Fails unless `|norm² − 1| ≤ 1e−6`.
    pub fn ensure_normalized(&self) -> Result<()> {
        let n = self.norm_sq();
        if (n - 1.0).abs() > 1e-6 || !n.is_finite() {
            Err(Error::NotNormalized(n))
        } else {
            Ok(())
        }
    }

    /// Moduli `|ψ_j|`.
    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    pub fn map(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Self {
        let values = self
            .grid
            .nodes()
            .iter()
            .zip(&self.values)
            .map(|(&r, &z)| f(r, z))
            .collect();
        Self {
            grid: self.grid.clone(),
            values,
        }
    }

    /// `e^{iθ} ψ`
    pub fn with_global_phase(&self, theta: f64) -> Self {
        let rot = Complex64::from_polar(1.0, theta);
        self.map(|_, z| z * rot)
    }

    /// Resamples onto another grid by linear interpolation of `u = r·ψ`
    /// (with `u(0) = 0`); nodes beyond the source grid get zero amplitude.
    pub fn resample(&self, target: &RadialGrid) -> Self {
        let src = self.grid.nodes();
        let h = self.grid.spacing();
        let u: Vec<Complex64> = src.iter().zip(&self.values).map(|(&r, &z)| z * r).collect();
        let n = src.len();
        let values = target
            .nodes()
            .iter()
            .map(|&r| {
                let x = r / h - 0.5;
                let ur = if x < 0.0 {
                    // between the origin (u = 0) and the first node
                    u[0] * (r / src[0])
                } else {
                    let i = x.floor() as usize;
                    if i + 1 < n {
                        let t = x - i as f64;
                        u[i] * (1.0 - t) + u[i + 1] * t
                    } else if i + 1 == n && r <= self.grid.r_max() {
                        // outer half cell, u vanishes at r_max
                        let t = (r - src[n - 1]) / (self.grid.r_max() - src[n - 1]);
                        u[n - 1] * (1.0 - t)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                };
                ur / r
            })
            .collect();
        Self {
            grid: target.clone(),
            values,
        }
    }
}

/// Rescales `ψ` to unit norm; the phase profile is untouched.
pub fn normalize(psi: &RadialWavefunction) -> Result<RadialWavefunction> {
    let n = psi.norm_sq();
    if !(n.is_finite() && n > 0.0) {
        return Err(Error::DegenerateNorm(n));
    }
    let s = n.sqrt().recip();
    Ok(psi.map(|_, z| z * s))
}

/// Normalized real Gaussian `ψ ∝ exp(−r²/4σ²)`, whose standard spread
/// `Δr` equals `σ`.
pub fn make_gaussian(grid: &RadialGrid, sigma: f64) -> Result<RadialWavefunction> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::param("sigma", format!("{sigma} must be > 0")));
    }
    if sigma > grid.r_max() / 4.0 {
        return Err(Error::param(
            "sigma",
            format!(
                "{sigma} exceeds r_max/4 = {}; the truncated tail would corrupt the norm",
                grid.r_max() / 4.0
            ),
        ));
    }
    let w = 1.0 / (4.0 * sigma * sigma);
    normalize(&RadialWavefunction::from_fn(grid.clone(), |r| {
        Complex64::new((-w * r * r).exp(), 0.0)
    }))
}

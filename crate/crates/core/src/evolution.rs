//! Time stepping of the radial equation with complex Newton coupling.
//!
//! With `V_ψ` the real mean field of coupling magnitude `G`, the right-hand
//! side is
//!
//! ```text
//! dψ/dt = (iħ/2M)(ψ″ + 2ψ′/r) − (i cos α/ħ) V_ψ ψ − (sin α/ħ)(V_ψ − ⟨V_ψ⟩) ψ
//! ```
//!
//! The counter term is attached only to the dissipative part; on the unitary
//! part a constant would be a pure gauge. The state is advanced as `u = r·ψ`,
//! for which the radial Laplacian is `u″/r`, with the odd reflection
//! `u(−r) = −u(r)` at the origin and `u(r_max) = 0` at the outer wall.
//! Time integration is the classical four-stage Runge–Kutta scheme.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::meanfield::prefix_pass;
use crate::params::{check_alpha, PhysicsParams};
use crate::wavefunction::RadialWavefunction;

/// Default `c` in `dt = c·M h²/ħ`.
pub const DEFAULT_STABILITY_FACTOR: f64 = 0.5;

/// Relative change of the norm within one step beyond which the step is
/// treated as diverging. The continuum flow conserves the norm exactly and the
/// scheme only drifts at `O(dt⁵)` per step.
const DIVERGENCE_NORM_JUMP: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub stability_factor: f64,
    pub renormalize_each_step: bool,
    pub max_steps: u64,
}

/// Explicit-scheme ceiling `M h²/ħ` on the time step.
pub fn stability_ceiling(grid: &RadialGrid, params: &PhysicsParams) -> f64 {
    params.mass * grid.spacing().powi(2) / params.hbar
}

impl EvolutionConfig {
    /// `dt = c·M h²/ħ` with `c ∈ (0, 1]`.
    pub fn new(grid: &RadialGrid, params: &PhysicsParams, stability_factor: f64) -> Result<Self> {
        if !(stability_factor > 0.0 && stability_factor <= 1.0) {
            return Err(Error::param(
                "stability_factor",
                format!("{stability_factor} must lie in (0, 1]"),
            ));
        }
        Ok(Self {
            dt: stability_factor * stability_ceiling(grid, params),
            stability_factor,
            renormalize_each_step: true,
            max_steps: u64::MAX,
        })
    }

    pub fn with_default_factor(grid: &RadialGrid, params: &PhysicsParams) -> Result<Self> {
        Self::new(grid, params, DEFAULT_STABILITY_FACTOR)
    }

    /// Overrides the step; it must stay within the stability ceiling.
    pub fn with_dt(self, dt: f64, grid: &RadialGrid, params: &PhysicsParams) -> Result<Self> {
        let ceiling = stability_ceiling(grid, params);
        if !(dt > 0.0 && dt <= ceiling * (1.0 + 1e-12)) {
            return Err(Error::param(
                "dt",
                format!("{dt:e} outside (0, M·h²/ħ = {ceiling:e}]"),
            ));
        }
        Ok(Self {
            dt,
            stability_factor: dt / ceiling,
            ..self
        })
    }

    pub fn without_renormalization(self) -> Self {
        Self {
            renormalize_each_step: false,
            ..self
        }
    }

    pub fn with_max_steps(self, max_steps: u64) -> Self {
        Self { max_steps, ..self }
    }

    pub fn validate(&self, grid: &RadialGrid, params: &PhysicsParams) -> Result<()> {
        self.with_dt(self.dt, grid, params).map(|_| ())
    }
}

/// Coefficients of the discretized generator acting on `u = r·ψ`.
#[derive(Debug, Clone, Copy)]
struct Generator {
    /// `ħ / (2M h²)`
    kinetic: f64,
    /// `−4πGM²h`
    potential_pref: f64,
    /// `−(i cos α + sin α)/ħ`
    local: Complex64,
    /// `sin α / ħ`
    counter: f64,
}

impl Generator {
    fn new(grid: &RadialGrid, params: &PhysicsParams) -> Self {
        let h = grid.spacing();
        let (s, c) = params.alpha.sin_cos();
        Self {
            kinetic: params.hbar / (2.0 * params.mass * h * h),
            potential_pref: -4.0 * PI * params.gm2() * h,
            local: Complex64::new(-s, -c) / params.hbar,
            counter: s / params.hbar,
        }
    }
}

/// Scratch buffers for evaluating the generator.
#[derive(Debug, Clone)]
struct Workspace {
    weights: Vec<f64>,
    potential: Vec<f64>,
}

impl Workspace {
    fn new(n: usize) -> Self {
        Self {
            weights: vec![0.0; n],
            potential: vec![0.0; n],
        }
    }

    /// `out = du/dt` for the state `u`.
    fn eval(&mut self, gen: &Generator, inv_r: &[f64], u: &[Complex64], out: &mut [Complex64]) {
        let n = u.len();
        // weights, their total and the suffix sums in one backward sweep
        let mut total = 0.0;
        let mut outer = 0.0;
        for ((w, v), (z, ir)) in self
            .weights
            .iter_mut()
            .zip(self.potential.iter_mut())
            .zip(u.iter().zip(inv_r))
            .rev()
        {
            *w = z.norm_sqr();
            *v = outer;
            outer += *w * ir;
            total += *w;
        }
        let sum = prefix_pass(
            &self.weights,
            inv_r,
            gen.potential_pref,
            &mut self.potential,
        );
        // quotient form keeps the semi-discrete flow norm-conserving at
        // intermediate stages, where the norm is not exactly one
        let mean = if total > 0.0 { sum / total } else { 0.0 };
        let shift = gen.counter * mean;
        let apply = |left: Complex64, mid: Complex64, right: Complex64, v: f64| {
            let lap = left + right - mid * 2.0;
            let kin = Complex64::new(-lap.im, lap.re) * gen.kinetic;
            kin + mid * Complex64::new(gen.local.re * v + shift, gen.local.im * v)
        };
        let pot = &self.potential[..n];
        // ghost nodes: u(−h/2) = −u(h/2), u(r_max + h/2) = −u(r_max − h/2)
        out[0] = apply(-u[0], u[0], u[1], pot[0]);
        for ((o, w), &v) in out[1..n - 1]
            .iter_mut()
            .zip(u.windows(3))
            .zip(&pot[1..n - 1])
        {
            *o = apply(w[0], w[1], w[2], v);
        }
        out[n - 1] = apply(u[n - 2], u[n - 1], -u[n - 1], pot[n - 1]);
    }
}

/// Evolves one trajectory in place; reuses its buffers across steps.
#[derive(Debug, Clone)]
pub struct Propagator {
    grid: RadialGrid,
    params: PhysicsParams,
    cfg: EvolutionConfig,
    gen: Generator,
    inv_r: Vec<f64>,
    u: Vec<Complex64>,
    stage: Vec<Complex64>,
    slope: Vec<Complex64>,
    acc: Vec<Complex64>,
    ws: Workspace,
    steps: u64,
    time: f64,
}

impl Propagator {
    pub fn new(
        psi: &RadialWavefunction,
        params: &PhysicsParams,
        cfg: &EvolutionConfig,
    ) -> Result<Self> {
        params.validate()?;
        psi.ensure_normalized()?;
        let grid = psi.grid().clone();
        let n = grid.n_points();
        if !cfg.dt.is_finite() || cfg.dt <= 0.0 {
            return Err(Error::param("dt", format!("{} must be > 0", cfg.dt)));
        }
        let nodes = grid.nodes();
        let u = psi
            .values()
            .iter()
            .zip(nodes)
            .map(|(z, &r)| z * r)
            .collect();
        Ok(Self {
            gen: Generator::new(&grid, params),
            inv_r: nodes.iter().map(|r| r.recip()).collect(),
            grid,
            params: *params,
            cfg: *cfg,
            u,
            stage: vec![Complex64::default(); n],
            slope: vec![Complex64::default(); n],
            acc: vec![Complex64::default(); n],
            ws: Workspace::new(n),
            steps: 0,
            time: 0.0,
        })
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.cfg.dt
    }

    pub fn params(&self) -> &PhysicsParams {
        &self.params
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    /// `4π Σ |u_j|² h`
    fn norm_sq(&self) -> f64 {
        4.0 * PI * self.grid.spacing() * self.u.iter().map(|z| z.norm_sqr()).sum::<f64>()
    }

    /// Advances by one time step.
    pub fn step(&mut self) -> Result<()> {
        let dt = self.cfg.dt;
        let half = 0.5 * dt;
        let Self {
            gen,
            inv_r,
            u,
            stage,
            slope,
            acc,
            ws,
            ..
        } = self;

        ws.eval(gen, inv_r, u, slope);
        for (((a, s), k), x) in acc
            .iter_mut()
            .zip(stage.iter_mut())
            .zip(slope.iter())
            .zip(u.iter())
        {
            *a = *k;
            *s = x + k * half;
        }
        for h in [half, dt] {
            ws.eval(gen, inv_r, stage, slope);
            for (((a, s), k), x) in acc
                .iter_mut()
                .zip(stage.iter_mut())
                .zip(slope.iter())
                .zip(u.iter())
            {
                *a += k * 2.0;
                *s = x + k * h;
            }
        }
        ws.eval(gen, inv_r, stage, slope);
        let sixth = dt / 6.0;
        for ((x, a), k) in u.iter_mut().zip(acc.iter()).zip(slope.iter()) {
            *x += (a + k) * sixth;
        }

        self.steps += 1;
        self.time += dt;

        let n = self.norm_sq();
        if !n.is_finite() || (n - 1.0).abs() > DIVERGENCE_NORM_JUMP {
            return Err(Error::Unstable {
                steps: self.steps,
                dt,
                ceiling: stability_ceiling(&self.grid, &self.params),
            });
        }
        if self.cfg.renormalize_each_step {
            let s = n.sqrt().recip();
            self.u.iter_mut().for_each(|z| *z *= s);
        }
        Ok(())
    }

    pub fn advance(&mut self, n_steps: u64) -> Result<()> {
        for _ in 0..n_steps {
            self.step()?;
        }
        Ok(())
    }

    /// Current `ψ = u/r`.
    pub fn state(&self) -> RadialWavefunction {
        let values = self
            .u
            .iter()
            .zip(&self.inv_r)
            .map(|(z, ir)| z * ir)
            .collect();
        RadialWavefunction::new(self.grid.clone(), values).expect("buffer matches grid")
    }

    /// `ψ` at node `j`.
    pub fn amplitude(&self, j: usize) -> Complex64 {
        self.u[j] * self.inv_r[j]
    }
}

/// `dψ/dt` at every node for a normalized state.
pub fn rhs(psi: &RadialWavefunction, params: &PhysicsParams) -> Result<Vec<Complex64>> {
    check_alpha(params.alpha)?;
    params.validate()?;
    psi.ensure_normalized()?;
    let grid = psi.grid();
    let nodes = grid.nodes();
    let inv_r: Vec<f64> = nodes.iter().map(|r| r.recip()).collect();
    let u: Vec<Complex64> = psi
        .values()
        .iter()
        .zip(nodes)
        .map(|(z, &r)| z * r)
        .collect();
    let mut du = vec![Complex64::default(); u.len()];
    Workspace::new(u.len()).eval(&Generator::new(grid, params), &inv_r, &u, &mut du);
    Ok(du.iter().zip(&inv_r).map(|(z, ir)| z * ir).collect())
}

/// One Runge–Kutta step of a normalized state.
pub fn step(
    psi: &RadialWavefunction,
    params: &PhysicsParams,
    cfg: &EvolutionConfig,
) -> Result<RadialWavefunction> {
    let mut prop = Propagator::new(psi, params, cfg)?;
    prop.step()?;
    Ok(prop.state())
}

//! Newtonian mean field of a spherically symmetric state.
//!
//! For a radial density the potential reduces to a `1/max(r, r′)` kernel:
//!
//! ```text
//! V(r) = −4πGM² [ (1/r) ∫₀^r |ψ|² r′² dr′ + ∫_r^∞ |ψ|² r′ dr′ ]
//! ```
//!
//! which is evaluated in O(N) with one suffix-sum and one prefix-sum pass.
//! The discrete kernel counts the diagonal term `k = j` once, as `r_j`, so the
//! result coincides with the direct double sum over `1/max(r_j, r_k)`.

use std::f64::consts::PI;

use crate::error::Result;
use crate::grid::RadialGrid;
use crate::params::PhysicsParams;
use crate::wavefunction::RadialWavefunction;

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialProfile {
    pub grid: RadialGrid,
    /// `V_ψ(r_j)` in energy units.
    pub values: Vec<f64>,
    /// `⟨V_ψ⟩`, the norm-restoring counter term.
    pub expectation: f64,
}

/// Fills `out` with the potential sourced by the radial weights
/// `w_j = |ψ_j|² r_j²` (equivalently `|u_j|²` for `u = r·ψ`).
///
/// `pref` is `−4πGM²h`. Returns `Σ_j w_j V_j`, the unscaled expectation sum.
pub(crate) fn potential_from_weights(
    weights: &[f64],
    inv_r: &[f64],
    pref: f64,
    out: &mut [f64],
) -> f64 {
    let n = weights.len();
    debug_assert!(inv_r.len() == n && out.len() == n);
    // suffix pass: out[j] = Σ_{k>j} w_k / r_k
    let mut outer = 0.0;
    for j in (0..n).rev() {
        out[j] = outer;
        outer += weights[j] * inv_r[j];
    }
    prefix_pass(weights, inv_r, pref, out)
}

/// Second pass of [`potential_from_weights`]; expects the suffix sums in
/// `out` and overwrites them with the potential.
#[inline]
pub(crate) fn prefix_pass(weights: &[f64], inv_r: &[f64], pref: f64, out: &mut [f64]) -> f64 {
    let mut inner = 0.0;
    let mut expect = 0.0;
    for ((o, &w), &ir) in out.iter_mut().zip(weights).zip(inv_r) {
        inner += w;
        let v = pref * (inner * ir + *o);
        *o = v;
        expect += w * v;
    }
    expect
}

/// Mean-field potential of a normalized state, computed with coupling
/// magnitude `G` (the phase `α` is applied by the evolution).
pub fn compute_potential(
    psi: &RadialWavefunction,
    params: &PhysicsParams,
) -> Result<PotentialProfile> {
    psi.ensure_normalized()?;
    let grid = psi.grid();
    let h = grid.spacing();
    let nodes = grid.nodes();
    let weights: Vec<f64> = psi
        .values()
        .iter()
        .zip(nodes)
        .map(|(z, &r)| z.norm_sqr() * r * r)
        .collect();
    let inv_r: Vec<f64> = nodes.iter().map(|r| r.recip()).collect();
    let mut values = vec![0.0; weights.len()];
    let sum = potential_from_weights(&weights, &inv_r, -4.0 * PI * params.gm2() * h, &mut values);
    Ok(PotentialProfile {
        grid: grid.clone(),
        values,
        expectation: 4.0 * PI * h * sum,
    })
}

/// `⟨V_ψ⟩ = 4π Σ_j |ψ_j|² V_j r_j² h`.
pub fn potential_expectation(psi: &RadialWavefunction, pot: &PotentialProfile) -> Result<f64> {
    psi.grid()
        .ensure_same(&pot.grid, "wavefunction vs potential")?;
    let v = &pot.values;
    Ok(psi
        .grid()
        .integrate_ball(|j| psi.values()[j].norm_sqr() * v[j]))
}

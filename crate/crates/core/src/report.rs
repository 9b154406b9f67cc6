use serde::{Deserialize, Serialize};

/// Observables of the evolving state at one sampling instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableRecord {
    pub time: f64,
    pub norm_sq: f64,
    pub spread_r: f64,
    pub spread_p: f64,
    pub kinetic_energy: f64,
    /// `arg ψ` at the reference node, wrapped to `(−π, π]`.
    pub phase_at_ref: f64,
}

/// Summary of a relaxation run, in natural units (`ħ²/GM³` for length,
/// `G²M⁵/ħ²` for energy, `GM³/ħ` for momentum, `G²M⁵/ħ³` for the drift rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StationaryReport {
    pub spread_r0: f64,
    pub energy_e0: f64,
    pub spread_p0: f64,
    pub correlation_r0: f64,
    /// Least-squares `d(arg ψ)/dt` at the reference node over the trailing
    /// window; equals `−E₀/ħ` for a stationary state.
    pub phase_drift: f64,
    pub converged: bool,
    pub iterations: u64,
    /// Final shape-change rate `max_j d|ψ_j|/dt`, compared against
    /// the shape tolerance.
    pub residual: f64,
    /// Final `(max Δr − min Δr) / mean Δr` over the trailing window.
    pub spread_fluctuation: f64,
    /// Evolution time at which the run stopped.
    pub final_time: f64,
}

//! Numerical laboratory for the frictional Schrödinger–Newton equation with a
//! complex Newton coupling `G·e^(−iα)`.
//!
//! The crate works with spherically symmetric one-body states sampled on a
//! staggered radial grid. It relaxes wave packets to their localized
//! stationary state by real-time dissipative evolution, measures the
//! stationary observables (spread, kinetic energy, momentum spread, the
//! position–momentum correlation scalar `R₀`) and implements the
//! far-separation two-body reduction that turns the imaginary mean field into
//! an induced Newtonian attraction `dp̄/dt = 2R₀F`.
//!
//! Internally everything is expressed in the physical values held by
//! [`PhysicsParams`]; reports are converted to the natural unit system
//! (`ħ²/GM³` for length, `G²M⁵/ħ²` for energy, ...) through [`UnitSystem`].

pub mod error;
pub mod evolution;
pub mod grid;
pub mod meanfield;
pub mod observables;
pub mod params;
pub mod relaxation;
pub mod report;
pub mod twobody;
pub mod wavefunction;

pub use error::{Error, Result};
pub use evolution::{rhs, step, EvolutionConfig, Propagator};
pub use grid::{make_grid, RadialGrid};
pub use meanfield::{compute_potential, potential_expectation, PotentialProfile};
pub use observables::{
    correlation_matrix_isotropy, correlation_r0, kinetic_energy, norm_sq, phase_drift_rate,
    phase_profile, spread_p, spread_r, PhaseProfile,
};
pub use params::{PhysicsParams, UnitSystem};
pub use relaxation::{
    relax, relax_from, shape_distance, ConvergenceCriterion, InitialCondition, Relaxation,
};
pub use report::{ObservableRecord, StationaryReport};
pub use twobody::{
    effective_coupling, induced_acceleration, linearized_cross_potential, newton_force,
    sweep_alpha, verify_acceleration_identity, AccelerationCheck, BodyState, CrossPotential,
    SweepRow, SweepSettings, Vec3,
};
pub use wavefunction::{make_gaussian, normalize, RadialWavefunction};

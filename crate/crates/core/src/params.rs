use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical constants of a run and the coupling phase `α` of the complex
/// Newton constant `G·e^(−iα)`.
///
/// `α = 0` is the reversible Schrödinger–Newton equation, `α = π/2` the purely
/// imaginary (frictional) coupling. `α = π`, the repulsive reversible case, is
/// rejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicsParams {
    pub hbar: f64,
    pub newton_g: f64,
    pub mass: f64,
    pub alpha: f64,
}

impl Default for PhysicsParams {
    /// `ħ = G = M = 1`, `α = π/2`.
    fn default() -> Self {
        Self {
            hbar: 1.0,
            newton_g: 1.0,
            mass: 1.0,
            alpha: FRAC_PI_2,
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("{v} must be finite and > 0")))
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.0..PI).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::param("alpha", format!("{alpha} must lie in [0, π)")))
    }
}

impl PhysicsParams {
    pub fn new(hbar: f64, newton_g: f64, mass: f64, alpha: f64) -> Result<Self> {
        positive("hbar", hbar)?;
        positive("newton_g", newton_g)?;
        positive("mass", mass)?;
        check_alpha(alpha)?;
        Ok(Self {
            hbar,
            newton_g,
            mass,
            alpha,
        })
    }

    /// Dimensionless units `ħ = G = M = 1` with the given coupling phase.
    pub fn natural(alpha: f64) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, alpha)
    }

    /// Gravity switched off (`G = 0`): free Schrödinger evolution, used as a
    /// control run. Not usable where a unit system is needed.
    pub fn free_particle(hbar: f64, mass: f64) -> Result<Self> {
        positive("hbar", hbar)?;
        positive("mass", mass)?;
        Ok(Self {
            hbar,
            newton_g: 0.0,
            mass,
            alpha: FRAC_PI_2,
        })
    }

    pub fn with_alpha(self, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self { alpha, ..self })
    }

    /// Re-checks the invariants; fields are public so a struct literal can
    /// bypass [`PhysicsParams::new`].
    pub fn validate(&self) -> Result<()> {
        positive("hbar", self.hbar)?;
        positive("mass", self.mass)?;
        if !(self.newton_g.is_finite() && self.newton_g >= 0.0) {
            return Err(Error::param(
                "newton_g",
                format!("{} must be finite and >= 0", self.newton_g),
            ));
        }
        check_alpha(self.alpha)
    }

    /// `GM²`, the strength of the Newtonian pair potential.
    pub fn gm2(&self) -> f64 {
        self.newton_g * self.mass * self.mass
    }

    pub fn units(&self) -> Result<UnitSystem> {
        positive("newton_g", self.newton_g)?;
        Ok(UnitSystem::from_params(self))
    }
}

/// Natural scales of the self-gravitating one-body problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    /// `ħ²/GM³`
    pub length: f64,
    /// `ħ³/G²M⁵`
    pub time: f64,
    /// `G²M⁵/ħ²`
    pub energy: f64,
    /// `GM³/ħ`
    pub momentum: f64,
}

impl UnitSystem {
    fn from_params(p: &PhysicsParams) -> Self {
        let (h, g, m) = (p.hbar, p.newton_g, p.mass);
        Self {
            length: h * h / (g * m.powi(3)),
            time: h.powi(3) / (g * g * m.powi(5)),
            energy: g * g * m.powi(5) / (h * h),
            momentum: g * m.powi(3) / h,
        }
    }

    /// Unit of a wavefunction amplitude, `length^(−3/2)`.
    pub fn amplitude(&self) -> f64 {
        self.length.powf(-1.5)
    }
}

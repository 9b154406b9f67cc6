use std::sync::Arc;

use crate::error::{Error, Result};

/// Smallest grid accepted by [`make_grid`].
pub const MIN_POINTS: usize = 16;

/// Uniform radial grid on `(0, r_max]` with nodes staggered half a step off
/// the origin: `r_j = (j + 1/2)·h`, `h = r_max / n_points`.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    n_points: usize,
    r_max: f64,
    spacing: f64,
    nodes: Arc<[f64]>,
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.n_points == other.n_points && self.r_max == other.r_max
    }
}

pub fn make_grid(n_points: usize, r_max: f64) -> Result<RadialGrid> {
    RadialGrid::new(n_points, r_max)
}

impl RadialGrid {
    pub fn new(n_points: usize, r_max: f64) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::InvalidGrid(format!(
                "n_points = {n_points}, need at least {MIN_POINTS}"
            )));
        }
        if !r_max.is_finite() || r_max <= 0.0 {
            return Err(Error::InvalidGrid(format!(
                "r_max = {r_max} must be finite and positive"
            )));
        }
        let spacing = r_max / n_points as f64;
        let nodes = (0..n_points)
            .map(|j| (j as f64 + 0.5) * spacing)
            .collect::<Vec<_>>()
            .into();
        Ok(Self {
            n_points,
            r_max,
            spacing,
            nodes,
        })
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Node spacing `h`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Midpoint quadrature of a radial integrand over the ball:
    /// `4π Σ_j f_j r_j² h`.
    pub fn integrate_ball(&self, f: impl Fn(usize) -> f64) -> f64 {
        let h = self.spacing;
        4.0 * std::f64::consts::PI
            * h
            * self
                .nodes
                .iter()
                .enumerate()
                .map(|(j, &r)| f(j) * r * r)
                .sum::<f64>()
    }

    pub(crate) fn ensure_same(&self, other: &RadialGrid, what: &str) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!(
                "{what}: ({}, {}) vs ({}, {})",
                self.n_points, self.r_max, other.n_points, other.r_max
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn stagger_rule() {
        let g = make_grid(16, 16.0).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(&g.nodes()[..4], &[0.5, 1.5, 2.5, 3.5]);
        assert_eq!(*g.nodes().last().unwrap(), 15.5);
    }

    #[test]
    fn tiny_grids_are_rejected() {
        // (4, 4.0) would give nodes [0.5, 1.5, 2.5, 3.5] but is below the minimum size
        assert!(matches!(make_grid(4, 4.0), Err(Error::InvalidGrid(_))));
        assert!(make_grid(15, 1.0).is_err());
    }

    #[test]
    fn reference_grid() {
        let g = make_grid(2000, 40.0).unwrap();
        assert!((g.spacing() - 0.02).abs() < 1e-15);
        assert!((g.nodes()[0] - 0.01).abs() < 1e-15);
    }

    #[test]
    fn unit_grid_last_node() {
        let g = make_grid(16, 1.0).unwrap();
        assert_eq!(g.nodes().len(), 16);
        assert_eq!(*g.nodes().last().unwrap(), 0.96875);
        assert!(g.nodes().iter().all(|&r| r > 0.0 && r <= 1.0));
    }

    #[test]
    fn bad_radius() {
        assert!(make_grid(100, f64::NAN).is_err());
        assert!(make_grid(100, f64::INFINITY).is_err());
        assert!(make_grid(100, 0.0).is_err());
        assert!(make_grid(100, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn nodes_positive_and_increasing(n in 16usize..5000, r_max in 1e-3f64..1e4) {
            let g = make_grid(n, r_max).unwrap();
            let nodes = g.nodes();
            prop_assert!(nodes[0] > 0.0);
            prop_assert!(nodes.windows(2).all(|w| w[1] > w[0]));
            prop_assert!(((g.spacing() * n as f64) - r_max).abs() <= 1e-12 * r_max);
        }
    }
}

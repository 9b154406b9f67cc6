//! Relaxes a σ = 1 Gaussian at α = π/2 on a radial grid and prints the
//! stationary report.
//!
//! ```text
//! cargo run --release -p frsne --example relax_reference -- [n_points] [r_max]
//! ```

use std::time::Instant;

use frsne::{
    relax, ConvergenceCriterion, EvolutionConfig, InitialCondition, PhysicsParams, RadialGrid,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let r_max: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(40.0);

    let grid = RadialGrid::new(n, r_max)?;
    let params = PhysicsParams::default();
    let cfg = EvolutionConfig::with_default_factor(&grid, &params)?;
    let start = Instant::now();
    let run = relax(
        &InitialCondition::default(),
        &grid,
        &params,
        &cfg,
        &ConvergenceCriterion::default(),
    )?;
    println!("{:#?}", run.report);
    println!("wall time: {:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}

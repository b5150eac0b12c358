//! Equal-mass three-body census across several homogeneity degrees.

use ccenum::solver::{enumerate_with_stats, SolverSettings};
use ccenum::PotentialParams;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let settings = SolverSettings {
        starts: 500,
        seed: 42,
        ..Default::default()
    };
    for alpha in [0.0, 0.5, 1.0, 2.0, 3.7] {
        let params = PotentialParams::equal_masses(3, alpha)?;
        let run = enumerate_with_stats(&params, &settings);
        let collinear = run.classes.iter().filter(|c| c.is_collinear()).count();
        let indices: Vec<usize> = run
            .classes
            .iter()
            .filter_map(|c| c.reduced_index())
            .collect();
        println!(
            "alpha={alpha:<4} classes={} collinear={collinear} triangular={} indices={indices:?} converged={}/{}",
            run.classes.len(),
            run.classes.len() - collinear,
            run.stats.converged,
            run.stats.starts,
        );
    }
    Ok(())
}

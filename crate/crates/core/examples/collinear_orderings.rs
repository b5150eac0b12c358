//! One collinear class per ordering, here for four unequal masses.

use ccenum::acsystem::{ac_residual_inf, distances_of};
use ccenum::solver::{canonical_orderings, solve_collinear, SolverSettings};
use ccenum::PotentialParams;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, vec![1.0, 2.0, 0.5, 3.0])?;
    let settings = SolverSettings::default();
    for ordering in canonical_orderings(4) {
        let s = solve_collinear(&params, &ordering, &settings)?;
        let xs: Vec<String> = s
            .config
            .points()
            .iter()
            .map(|p| format!("{:+.6}", p.x))
            .collect();
        println!(
            "{ordering:?}  iters={:<2} residual={:.1e} ac={:.1e}  x=[{}]",
            s.iterations,
            s.residual_inf,
            ac_residual_inf(&params, &distances_of(&s.config)),
            xs.join(", ")
        );
    }
    Ok(())
}

//! Relative equilibria of point vortices: the logarithmic case `alpha = 0`,
//! including circulations of both signs.

use ccenum::solver::{enumerate, SolverSettings};
use ccenum::PotentialParams;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let settings = SolverSettings {
        starts: 1000,
        seed: 3,
        ..Default::default()
    };
    for circulations in [
        vec![1.0, 1.0, 1.0],
        vec![1.0, 1.0, 1.0, 1.0],
        vec![1.0, 1.0, -0.5],
    ] {
        let params = PotentialParams::new(0.0, circulations.clone())?;
        let classes = enumerate(&params, &settings);
        println!("circulations {circulations:?}: {} classes", classes.len());
        for c in &classes {
            let r: Vec<String> = c
                .fingerprint
                .distances
                .iter()
                .map(|d| format!("{d:.6}"))
                .collect();
            println!(
                "  #{:<2} collinear={:<5} nondegenerate={:<5} index={} distances=[{}]",
                c.id,
                c.is_collinear(),
                c.nondegenerate(),
                c.full_index(),
                r.join(", ")
            );
        }
    }
    Ok(())
}

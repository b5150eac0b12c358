//! Following classes as the homogeneity degree changes.

use ccenum::geometry::Configuration;
use ccenum::solver::{continue_family, sweep, SolverSettings};
use ccenum::PotentialParams;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::equal_masses(3, 0.0)?;
    let side = 3f64.sqrt();
    let h = side * 3f64.sqrt() / 2.0;
    let triangle = Configuration::from_xy(&[
        [0.0, 2.0 * h / 3.0],
        [-side / 2.0, -h / 3.0],
        [side / 2.0, -h / 3.0],
    ]);
    let settings = SolverSettings::default();
    let family = continue_family(&params, &triangle, 0.0, 3.0, 6, &settings)?;
    for p in &family.tracks[0].points {
        println!(
            "alpha={:.1} side={:.12} expected={:.12} gap={:.3e}",
            p.alpha,
            p.fingerprint.distances[0],
            3f64.powf(1.0 / (p.alpha + 2.0)),
            p.min_gap
        );
    }

    let coarse = SolverSettings {
        starts: 300,
        seed: 7,
        ..Default::default()
    };
    let result = sweep(&params, 0.0, 3.0, 3, &coarse)?;
    println!("counts along the grid: {:?}", result.counts);
    for t in &result.tracks {
        println!(
            "class {} followed through {} grid points",
            t.class_id,
            t.points.len()
        );
    }
    println!("degeneration events: {}", result.events.len());
    Ok(())
}

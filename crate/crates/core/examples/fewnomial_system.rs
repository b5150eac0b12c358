//! The polynomial system in distances and auxiliary power variables.

use ccenum::acsystem::{ac_residual, distances_of};
use ccenum::fewnomial::{build_system, evaluate_system, u_of_n};
use ccenum::geometry::Configuration;
use ccenum::PotentialParams;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = PotentialParams::new(1.0, vec![1.0, 2.0, 3.0])?;
    let system = build_system(&params);
    let names = system.variable_names();
    for (k, eq) in system.equations.iter().enumerate() {
        println!("E{} = {}", k + 1, eq.display(&names));
    }
    println!("{}", system.summary());
    assert_eq!(system.summary().khovanskii, u_of_n(3).to_string());

    // Any triangle with all sides equal to M^(1/3) solves the system.
    let s = 6f64.cbrt();
    let h = s * 3f64.sqrt() / 2.0;
    let config = Configuration::from_xy(&[[0.0, 0.0], [s, 0.0], [s / 2.0, h]]);
    let d = distances_of(&config);
    let values = evaluate_system(&system, &params, &d);
    let show = |v: &[f64]| {
        v.iter()
            .map(|x| format!("{x:.2e}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    println!(
        "system values at the equilateral triangle: {}",
        show(&values)
    );
    println!(
        "distance residuals:                        {}",
        show(&ac_residual(&params, &d))
    );
    Ok(())
}

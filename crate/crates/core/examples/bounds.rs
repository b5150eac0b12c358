//! Exact upper and lower bounds on the number of classes for small `n`.

use ccenum::bounds::{bounds_report, poincare_polynomial};

pub fn main() {
    for n in 2..=6 {
        let report = bounds_report(n);
        let digits = report.upper.to_string().len();
        println!(
            "n={n}  lower={:<4} upper has {digits} digits  poincare={:?}",
            report.lower.to_string(),
            report
                .poincare
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
        );
    }
    // the coefficients sum to n!
    let p = poincare_polynomial(8);
    let total: num_bigint::BigUint = p.iter().sum();
    println!("sum of coefficients for n=8: {total}");
    println!("u(3) = {}", bounds_report(3).upper);
}

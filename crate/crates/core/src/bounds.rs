//! Exact lower bound `n!/2` from the Poincaré polynomial
//! `P(t) = (1 + t)(1 + 2t)...(1 + (n-1)t)` and the combined bounds report.

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::fewnomial::u_of_n;

/// Coefficients of `prod_{k=1}^{n-1} (1 + k t)`, lowest degree first.
pub fn poincare_polynomial(n: usize) -> Vec<BigUint> {
    let mut coeffs = vec![BigUint::one()];
    for k in 1..n {
        let k = BigUint::from(k);
        let mut next = coeffs.clone();
        next.push(BigUint::default());
        for (d, c) in coeffs.iter().enumerate() {
            next[d + 1] += c * &k;
        }
        coeffs = next;
    }
    coeffs
}

/// `l(n) = n!/2`.
pub fn lower_bound(n: usize) -> BigUint {
    let total: BigUint = poincare_polynomial(n).iter().sum();
    total / 2u32
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub n: usize,
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub upper: BigUint,
    #[serde(serialize_with = "crate::report::biguint_string")]
    pub lower: BigUint,
    #[serde(serialize_with = "crate::report::biguint_strings")]
    pub poincare: Vec<BigUint>,
}

/// Upper and lower bounds on the number of non-degenerate classes. Neither
/// depends on the homogeneity degree or on the masses.
pub fn bounds_report(n: usize) -> BoundsReport {
    let upper = u_of_n(n);
    let poincare = poincare_polynomial(n);
    let lower = lower_bound(n);
    assert!(
        lower <= upper,
        "lower bound exceeds upper bound for n = {n}"
    );
    BoundsReport {
        n,
        upper,
        lower,
        poincare,
    }
}

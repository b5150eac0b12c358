//! The distance equations rewritten as a polynomial system in auxiliary
//! variables, and Khovanskii's fewnomial bound on its non-degenerate solutions.
//!
//! For every pair `i < j` there are three variables: the distance `r_ij`,
//! `Y_ij` standing for `exp((alpha + 2) z_ij) = r_ij^-(alpha+2)` and
//! `Yt_ij` standing for `exp(-z_ij) = r_ij`, where `z_ij = -ln r_ij`. The system
//! is one cubic equation per pair (the distance equation with `Y` in place of
//! the power) and one linear equation `r_ij - Yt_ij = 0` per pair. The
//! homogeneity degree only enters through the substitution, never through the
//! polynomials.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::geometry::{pair_index, pairs, DistanceVector, PotentialParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    Distance(usize, usize),
    /// `r^-(alpha+2)`
    Power(usize, usize),
    /// `exp(-z) = r`
    Exp(usize, usize),
}

impl Variable {
    fn label(self, n: usize) -> String {
        let (prefix, i, j) = match self {
            Variable::Distance(i, j) => ("r", i, j),
            Variable::Power(i, j) => ("Y", i, j),
            Variable::Exp(i, j) => ("Yt", i, j),
        };
        if n < 10 {
            format!("{prefix}{}{}", i + 1, j + 1)
        } else {
            format!("{prefix}{}_{}", i + 1, j + 1)
        }
    }
}

/// Sorted `(variable id, exponent)` pairs; the empty monomial is `1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(id: usize) -> Self {
        Monomial(vec![(id, 1)])
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut merged: BTreeMap<usize, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *merged.entry(v).or_insert(0) += e;
        }
        Monomial(merged.into_iter().collect())
    }
}

/// Sparse polynomial with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, BigRational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: BigRational) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(id: usize) -> Self {
        let mut p = Polynomial::zero();
        p.add_term(Monomial::var(id), BigRational::one());
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, mono: Monomial, coeff: BigRational) {
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(mono).or_insert_with(BigRational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        let mut out = Polynomial::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn eval(&self, values: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                let c = c.to_f64().unwrap_or(f64::NAN);
                m.0.iter()
                    .fold(c, |acc, &(v, e)| acc * values[v].powi(e as i32))
            })
            .sum()
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolynomialDisplay<'a> {
        PolynomialDisplay { poly: self, names }
    }
}

pub struct PolynomialDisplay<'a> {
    poly: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for PolynomialDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (k, (mono, coeff)) in self.poly.terms.iter().enumerate() {
            let negative = coeff.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let abs = coeff.abs();
            let factors: Vec<String> = mono
                .0
                .iter()
                .map(|&(v, e)| {
                    if e == 1 {
                        self.names[v].clone()
                    } else {
                        format!("{}^{}", self.names[v], e)
                    }
                })
                .collect();
            if factors.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{abs}*{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// The augmented polynomial system with its degree bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct FewnomialSystem {
    pub n: usize,
    pub variables: Vec<Variable>,
    /// Cubic pair equations first, then the linear ones, both in pair order.
    pub equations: Vec<Polynomial>,
    pub degrees: Vec<u32>,
    /// Number of exponential variables (`Y` and `Yt`).
    pub k: usize,
}

impl FewnomialSystem {
    pub fn variable_names(&self) -> Vec<String> {
        self.variables.iter().map(|v| v.label(self.n)).collect()
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    pub fn summary(&self) -> DegreeSummary {
        DegreeSummary {
            n: self.n,
            equations: self.equations.len(),
            degree3: self.degrees.iter().filter(|&&d| d == 3).count(),
            degree1: self.degrees.iter().filter(|&&d| d == 1).count(),
            k: self.k,
            khovanskii: khovanskii_bound(&self.degrees, self.k).to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeSummary {
    pub n: usize,
    pub equations: usize,
    pub degree3: usize,
    pub degree1: usize,
    pub k: usize,
    pub khovanskii: String,
}

impl fmt::Display for DegreeSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "equations={} degree3={} degree1={} k={} khovanskii={}",
            self.equations, self.degree3, self.degree1, self.k, self.khovanskii
        )
    }
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite mass")
}

pub fn build_system(params: &PotentialParams) -> FewnomialSystem {
    let n = params.n();
    let np = n * (n - 1) / 2;
    let mut variables = Vec::with_capacity(3 * np);
    for (i, j) in pairs(n) {
        variables.push(Variable::Distance(i, j));
    }
    for (i, j) in pairs(n) {
        variables.push(Variable::Power(i, j));
    }
    for (i, j) in pairs(n) {
        variables.push(Variable::Exp(i, j));
    }
    let id = |a: usize, b: usize| {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        pair_index(n, a, b)
    };
    let inv_total = BigRational::one() / exact(params.total_mass());
    let masses: Vec<BigRational> = params.masses().iter().map(|&m| exact(m)).collect();

    let r_sq = |a: usize, b: usize| -> Polynomial {
        if a == b {
            Polynomial::zero()
        } else {
            let r = Polynomial::var(id(a, b));
            r.mul(&r)
        }
    };
    let s = |a: usize, b: usize| -> Polynomial {
        if a == b {
            Polynomial::zero()
        } else {
            Polynomial::var(np + id(a, b)).sub(&Polynomial::constant(inv_total.clone()))
        }
    };

    let mut equations = Vec::with_capacity(2 * np);
    for (i, j) in pairs(n) {
        let rij = r_sq(i, j);
        let mut eq = Polynomial::zero();
        for (k, mk) in masses.iter().enumerate() {
            let (rik, rjk) = (r_sq(i, k), r_sq(j, k));
            let first = s(i, k).mul(&rjk.sub(&rik).sub(&rij));
            let second = s(j, k).mul(&rik.sub(&rjk).sub(&rij));
            eq = eq.add(&first.add(&second).scale(mk));
        }
        equations.push(eq);
    }
    for p in 0..np {
        equations.push(Polynomial::var(p).sub(&Polynomial::var(2 * np + p)));
    }
    let degrees = equations.iter().map(Polynomial::degree).collect();
    FewnomialSystem {
        n,
        variables,
        equations,
        degrees,
        k: 2 * np,
    }
}

/// Evaluates every equation after substituting `Y = r^-(alpha+2)` and `Yt = r`.
pub fn evaluate_system(
    system: &FewnomialSystem,
    params: &PotentialParams,
    distances: &DistanceVector,
) -> Vec<f64> {
    let np = system.pair_count();
    let exponent = params.exponent();
    let r = distances.entries();
    let mut values = Vec::with_capacity(3 * np);
    values.extend_from_slice(r);
    values.extend(r.iter().map(|x| x.powf(-exponent)));
    values.extend_from_slice(r);
    system.equations.iter().map(|e| e.eval(&values)).collect()
}

/// `prod n_i * (sum n_i + 1)^k * 2^(k(k-1)/2)`.
pub fn khovanskii_bound(degrees: &[u32], k: usize) -> BigUint {
    let product: BigUint = degrees.iter().map(|&d| BigUint::from(d)).product();
    let sum: u64 = degrees.iter().map(|&d| u64::from(d)).sum();
    let base = BigUint::from(sum + 1);
    let k32 = u32::try_from(k).expect("k fits in u32");
    let two_exp = k * k.saturating_sub(1) / 2;
    product * base.pow(k32) * (BigUint::one() << two_exp)
}

/// `u(n) = 3^(n(n-1)/2) (2n^2 - 2n + 1)^(n(n-1)) 2^((n^2-n)(n^2-n-1)/2)`.
pub fn u_of_n(n: usize) -> BigUint {
    let pairs = n * (n - 1) / 2;
    let k = n * (n - 1);
    let three = BigUint::from(3u32).pow(pairs as u32);
    let base = BigUint::from(2 * n * n - 2 * n + 1).pow(k as u32);
    three * base * (BigUint::one() << (k * k.saturating_sub(1) / 2))
}

//! Planar configurations, the homogeneous potential and its derivatives.
//!
//! Every evaluation works with the normalized central configuration residual
//!
//! ```text
//! R_i(q) = sum_{j != i} m_j (q_j - q_i) / r_ij^(alpha+2) + q_i
//! ```
//!
//! which vanishes exactly at central configurations with multiplier 1 and
//! center of mass at the origin. `R` is the mass-weighted gradient of the
//! action `G = Phi + I_0 / 2`, where `I_0 = sum m_i |q_i|^2` and
//! `Phi = U / alpha` for `alpha > 0`, `Phi = -U_0` for the logarithmic case.

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};

use crate::error::{Error, Result};

/// Smallest admissible separation, relative to the configuration diameter.
pub const COLLISION_RATIO: f64 = 1e-10;

/// Homogeneity degree and masses (or circulations) of the bodies.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialParams {
    alpha: f64,
    masses: Vec<f64>,
    total_mass: f64,
}

impl PotentialParams {
    pub fn new(alpha: f64, masses: Vec<f64>) -> Result<Self> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidAlpha(alpha));
        }
        if masses.len() < 2 {
            return Err(Error::TooFewBodies(masses.len()));
        }
        if masses.iter().any(|m| !m.is_finite()) {
            return Err(Error::NonFiniteMass);
        }
        if let Some(index) = masses.iter().position(|&m| m == 0.0) {
            return Err(Error::ZeroMass { index });
        }
        let total_mass: f64 = masses.iter().sum();
        if total_mass == 0.0 {
            return Err(Error::ZeroTotalMass);
        }
        Ok(PotentialParams {
            alpha,
            masses,
            total_mass,
        })
    }

    pub fn equal_masses(n: usize, alpha: f64) -> Result<Self> {
        Self::new(alpha, vec![1.0; n])
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn n(&self) -> usize {
        self.masses.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn all_positive(&self) -> bool {
        self.masses.iter().all(|&m| m > 0.0)
    }

    /// Same masses, different homogeneity degree.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.masses.clone())
    }

    /// The exponent `alpha + 2` appearing in every interaction term.
    pub fn exponent(&self) -> f64 {
        self.alpha + 2.0
    }

    fn check(&self, config: &Configuration) -> Result<()> {
        if config.len() != self.n() {
            return Err(Error::BodyCountMismatch {
                expected: self.n(),
                got: config.len(),
            });
        }
        Ok(())
    }
}

/// `n` labeled points in the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    points: Vec<Vector2<f64>>,
}

impl Configuration {
    pub fn new(points: Vec<Vector2<f64>>) -> Self {
        Configuration { points }
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Self {
        Configuration {
            points: points.iter().map(|p| Vector2::new(p[0], p[1])).collect(),
        }
    }

    /// Interleaved layout `(x_1, y_1, x_2, y_2, ...)`.
    pub fn from_flat(flat: &DVector<f64>) -> Self {
        assert!(flat.len().is_multiple_of(2), "flat coordinate vector has odd length");
        Configuration {
            points: (0..flat.len() / 2)
                .map(|i| Vector2::new(flat[2 * i], flat[2 * i + 1]))
                .collect(),
        }
    }

    pub fn to_flat(&self) -> DVector<f64> {
        DVector::from_iterator(
            2 * self.points.len(),
            self.points.iter().flat_map(|p| [p.x, p.y]),
        )
    }

    pub fn to_xy(&self) -> Vec<[f64; 2]> {
        self.points.iter().map(|p| [p.x, p.y]).collect()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vector2<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> Vector2<f64> {
        self.points[i]
    }

    pub fn translated(&self, v: Vector2<f64>) -> Self {
        Configuration {
            points: self.points.iter().map(|p| p + v).collect(),
        }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Configuration {
            points: self.points.iter().map(|p| p * s).collect(),
        }
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (sin, cos) = angle.sin_cos();
        self.rotated_by(cos, sin)
    }

    /// Rotation given by its cosine and sine.
    pub fn rotated_by(&self, cos: f64, sin: f64) -> Self {
        let rot = Matrix2::new(cos, -sin, sin, cos);
        Configuration {
            points: self.points.iter().map(|p| rot * p).collect(),
        }
    }

    /// Reflection across the x-axis.
    pub fn mirrored(&self) -> Self {
        Configuration {
            points: self
                .points
                .iter()
                .map(|p| Vector2::new(p.x, -p.y))
                .collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.x.is_finite() && p.y.is_finite())
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    pub fn min_separation(&self) -> f64 {
        let mut min = f64::INFINITY;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                min = min.min((self.points[j] - self.points[i]).norm());
            }
        }
        min
    }

    pub fn diameter(&self) -> f64 {
        let mut max: f64 = 0.0;
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                max = max.max((self.points[j] - self.points[i]).norm());
            }
        }
        max
    }

    /// Infinitesimal rotation generator `(q_1^perp, ..., q_n^perp)`, flattened.
    pub fn rotation_generator(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.points.iter().flat_map(|p| [-p.y, p.x]))
    }
}

/// Mutual distances `r_ij`, `i < j`, in lexicographic pair order.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceVector {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceVector {
    pub fn of(config: &Configuration) -> Self {
        let n = config.len();
        let mut entries = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
        for i in 0..n {
            for j in i + 1..n {
                entries.push((config.point(j) - config.point(i)).norm());
            }
        }
        DistanceVector { n, entries }
    }

    /// Entries must be listed in lexicographic `(i, j)` order and be positive.
    pub fn from_entries(n: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * (n.saturating_sub(1)) / 2 {
            return Err(Error::BodyCountMismatch {
                expected: n * (n.saturating_sub(1)) / 2,
                got: entries.len(),
            });
        }
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                let r = entries[k];
                if !(r.is_finite() && r > 0.0) {
                    return Err(Error::Collision {
                        i,
                        j,
                        separation: r,
                    });
                }
                k += 1;
            }
        }
        Ok(DistanceVector { n, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `r_ij` for any ordered or unordered pair; `r_ii = 0`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.entries[pair_index(self.n, a, b)]
    }
}

/// Position of the pair `(i, j)`, `i < j`, in lexicographic order.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j`, in lexicographic order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

struct PairTerm {
    i: usize,
    j: usize,
    /// `q_j - q_i`
    delta: Vector2<f64>,
    r: f64,
}

fn pair_terms(params: &PotentialParams, config: &Configuration) -> Result<Vec<PairTerm>> {
    params.check(config)?;
    if !config.is_finite() {
        return Err(Error::NonFiniteCoordinates);
    }
    let n = config.len();
    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    let mut diameter: f64 = 0.0;
    for (i, j) in pairs(n) {
        let delta = config.point(j) - config.point(i);
        let r = delta.norm();
        diameter = diameter.max(r);
        terms.push(PairTerm { i, j, delta, r });
    }
    let floor = COLLISION_RATIO * diameter;
    if let Some(t) = terms.iter().find(|t| !(t.r > floor) || t.r == 0.0) {
        return Err(Error::Collision {
            i: t.i,
            j: t.j,
            separation: t.r,
        });
    }
    Ok(terms)
}

/// `U_alpha`: `sum m_i m_j / r^alpha` for `alpha > 0`, `sum m_i m_j ln r` for `alpha = 0`.
pub fn potential(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    let m = params.masses();
    let alpha = params.alpha();
    Ok(pair_terms(params, config)?
        .iter()
        .map(|t| {
            let mm = m[t.i] * m[t.j];
            if alpha == 0.0 {
                mm * t.r.ln()
            } else {
                mm * t.r.powf(-alpha)
            }
        })
        .sum())
}

pub fn center_of_mass(params: &PotentialParams, config: &Configuration) -> Result<Vector2<f64>> {
    params.check(config)?;
    let weighted = config
        .points()
        .iter()
        .zip(params.masses())
        .fold(Vector2::zeros(), |acc, (p, &m)| acc + p * m);
    Ok(weighted / params.total_mass())
}

/// Moment of inertia about the center of mass.
pub fn inertia(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    let c = center_of_mass(params, config)?;
    Ok(config
        .points()
        .iter()
        .zip(params.masses())
        .map(|(p, &m)| m * (p - c).norm_squared())
        .sum())
}

/// Translates the configuration so that its center of mass is the origin.
pub fn centered(params: &PotentialParams, config: &Configuration) -> Result<Configuration> {
    let c = center_of_mass(params, config)?;
    Ok(config.translated(-c))
}

/// Normalized residual `R`, interleaved `(R_1x, R_1y, ...)`.
pub fn cc_residual(params: &PotentialParams, config: &Configuration) -> Result<DVector<f64>> {
    let terms = pair_terms(params, config)?;
    let m = params.masses();
    let exponent = params.exponent();
    let mut out = config.to_flat();
    for t in &terms {
        let f = t.delta / t.r.powf(exponent);
        out[2 * t.i] += m[t.j] * f.x;
        out[2 * t.i + 1] += m[t.j] * f.y;
        out[2 * t.j] -= m[t.i] * f.x;
        out[2 * t.j + 1] -= m[t.i] * f.y;
    }
    Ok(out)
}

pub fn residual_inf_norm(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    Ok(cc_residual(params, config)?.amax())
}

/// Action `G = Phi_alpha + 1/2 sum m_i |q_i|^2` whose gradient is `m_i R_i`.
pub fn action_value(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    let u = potential(params, config)?;
    let phi = if params.alpha() == 0.0 {
        -u
    } else {
        u / params.alpha()
    };
    let half_inertia: f64 = config
        .points()
        .iter()
        .zip(params.masses())
        .map(|(p, &m)| 0.5 * m * p.norm_squared())
        .sum();
    Ok(phi + half_inertia)
}

pub fn action_gradient(params: &PotentialParams, config: &Configuration) -> Result<DVector<f64>> {
    let mut r = cc_residual(params, config)?;
    for (i, &m) in params.masses().iter().enumerate() {
        r[2 * i] *= m;
        r[2 * i + 1] *= m;
    }
    Ok(r)
}

/// Hessian of the action `G`, a symmetric `2n x 2n` matrix.
pub fn cc_hessian(params: &PotentialParams, config: &Configuration) -> Result<DMatrix<f64>> {
    let terms = pair_terms(params, config)?;
    let n = config.len();
    let m = params.masses();
    let exponent = params.exponent();
    let mut h = DMatrix::zeros(2 * n, 2 * n);
    for (i, &mi) in m.iter().enumerate() {
        h[(2 * i, 2 * i)] = mi;
        h[(2 * i + 1, 2 * i + 1)] = mi;
    }
    for t in &terms {
        let u = t.delta / t.r;
        let scale = m[t.i] * m[t.j] / t.r.powf(exponent);
        let block = (Matrix2::identity() - u * u.transpose() * exponent) * scale;
        for a in 0..2 {
            for b in 0..2 {
                let v = block[(a, b)];
                h[(2 * t.i + a, 2 * t.j + b)] += v;
                h[(2 * t.j + a, 2 * t.i + b)] += v;
                h[(2 * t.i + a, 2 * t.i + b)] -= v;
                h[(2 * t.j + a, 2 * t.j + b)] -= v;
            }
        }
    }
    Ok(h)
}

/// Jacobian of `R`, i.e. the Hessian of `G` with row `i` divided by `m_i`.
pub fn residual_jacobian(params: &PotentialParams, config: &Configuration) -> Result<DMatrix<f64>> {
    let mut h = cc_hessian(params, config)?;
    for (i, &m) in params.masses().iter().enumerate() {
        h.row_mut(2 * i).scale_mut(1.0 / m);
        h.row_mut(2 * i + 1).scale_mut(1.0 / m);
    }
    Ok(h)
}

/// Multiplier of a central configuration: `U / I` for `alpha > 0` and
/// `sum_{i<j} m_i m_j / I` for the logarithmic case.
pub fn lambda_of(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    let i = inertia(params, config)?;
    let numerator = if params.alpha() == 0.0 {
        params.check(config)?;
        let m = params.masses();
        pairs(m.len()).map(|(i, j)| m[i] * m[j]).sum()
    } else {
        potential(params, config)?
    };
    if i == 0.0 || !i.is_finite() {
        return Err(Error::DegenerateNormalization(format!("inertia {i}")));
    }
    Ok(numerator / i)
}

/// Centers the configuration and rescales it so that its multiplier is 1.
pub fn normalize_lambda(params: &PotentialParams, config: &Configuration) -> Result<Configuration> {
    let lambda = lambda_of(params, config)?;
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::DegenerateNormalization(format!(
            "multiplier {lambda} is not positive"
        )));
    }
    let s = lambda.powf(1.0 / params.exponent());
    Ok(centered(params, config)?.scaled(s))
}

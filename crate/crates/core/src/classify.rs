//! Canonical representatives, fingerprints and Hessian-based verdicts.
//!
//! Classes are counted modulo translation, rotation and dilation. Reflected
//! configurations and relabelings count as distinct classes.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::acsystem::{ac_residual_inf, distances_of, matrix_residual_fro};
use crate::error::{Error, Result};
use crate::geometry::{
    cc_hessian, center_of_mass, lambda_of, normalize_lambda, residual_inf_norm, Configuration,
    PotentialParams,
};

/// Default tolerance of [`same_class`] on normalized distances.
pub const DEDUP_TOL: f64 = 1e-6;
/// Default relative threshold below which a Hessian eigenvalue counts as zero.
pub const KERNEL_TOL: f64 = 1e-7;
/// Largest Cartesian residual accepted as "normalized" by [`classify_degeneracy`].
pub const NORMALIZED_TOL: f64 = 1e-8;

const COLLINEAR_AREA: f64 = 1e-8;
const RADIUS_TIE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Fingerprint {
    /// `r_ij`, `i < j`, lexicographic.
    pub distances: Vec<f64>,
    /// Sign of the signed area of the first non-degenerate labeled triple.
    pub orientation: i8,
}

impl Fingerprint {
    pub fn is_collinear(&self) -> bool {
        self.orientation == 0
    }
}

pub fn fingerprint(params: &PotentialParams, config: &Configuration) -> Fingerprint {
    debug_assert_eq!(params.n(), config.len());
    Fingerprint {
        distances: distances_of(config).entries().to_vec(),
        orientation: orientation(config),
    }
}

fn orientation(config: &Configuration) -> i8 {
    let n = config.len();
    let d = config.diameter();
    let floor = COLLINEAR_AREA * d * d;
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let a = config.point(j) - config.point(i);
                let b = config.point(k) - config.point(i);
                let cross = a.x * b.y - a.y * b.x;
                if cross.abs() > floor {
                    return if cross > 0.0 { 1 } else { -1 };
                }
            }
        }
    }
    0
}

pub fn same_class(a: &Fingerprint, b: &Fingerprint, tol: f64) -> bool {
    a.orientation == b.orientation
        && a.distances.len() == b.distances.len()
        && a.distances
            .iter()
            .zip(&b.distances)
            .all(|(x, y)| (x - y).abs() < tol)
}

/// Orders by orientation, then lexicographically by distances, treating
/// entries closer than `tol` as equal.
pub fn compare_fingerprints(a: &Fingerprint, b: &Fingerprint, tol: f64) -> Ordering {
    a.orientation.cmp(&b.orientation).then_with(|| {
        for (x, y) in a.distances.iter().zip(&b.distances) {
            if (x - y).abs() >= tol {
                return x.total_cmp(y);
            }
        }
        a.distances.len().cmp(&b.distances.len())
    })
}

fn anchor_body(config: &Configuration) -> usize {
    let radii: Vec<f64> = config.points().iter().map(|p| p.norm()).collect();
    let max = radii.iter().copied().fold(0.0, f64::max);
    radii
        .iter()
        .position(|&r| r >= max * (1.0 - RADIUS_TIE))
        .unwrap_or(0)
}

fn is_canonical(params: &PotentialParams, config: &Configuration) -> bool {
    let anchor = config.point(anchor_body(config));
    if !(anchor.y == 0.0 && anchor.x > 0.0) {
        return false;
    }
    let scale = config.max_radius();
    let centered = center_of_mass(params, config)
        .map(|c| c.norm() <= 1e-13 * scale)
        .unwrap_or(false);
    let unit = lambda_of(params, config)
        .map(|l| (l - 1.0).abs() <= 1e-12)
        .unwrap_or(false);
    centered && unit
}

/// Multiplier 1, center of mass at the origin, and the body farthest from the
/// origin (lowest index on ties) on the positive x-axis. Idempotent.
pub fn canonicalize(params: &PotentialParams, config: &Configuration) -> Result<Configuration> {
    if is_canonical(params, config) {
        return Ok(config.clone());
    }
    let normalized = normalize_lambda(params, config)?;
    let k = anchor_body(&normalized);
    let p = normalized.point(k);
    let r = p.norm();
    if r == 0.0 {
        return Err(Error::DegenerateNormalization(
            "all bodies at the origin".into(),
        ));
    }
    let rotated = normalized.rotated_by(p.x / r, -p.y / r);
    let mut points = rotated.points().to_vec();
    points[k].x = r;
    points[k].y = 0.0;
    Ok(Configuration::new(points))
}

/// Spectral data of the Hessian of the action at a central configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct HessianSummary {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    /// Smallest `|eigenvalue|` outside the numeric kernel.
    pub min_nonzero_abs: f64,
    pub nondegenerate: bool,
    /// Number of negative eigenvalues.
    pub full_index: usize,
    /// Index on the shape directions (translations, dilation and rotation
    /// removed); only defined for positive masses.
    pub reduced_index: Option<usize>,
}

pub fn classify_degeneracy(
    params: &PotentialParams,
    config: &Configuration,
    tol_zero: f64,
) -> Result<HessianSummary> {
    let residual = residual_inf_norm(params, config)?;
    if !(residual < NORMALIZED_TOL) {
        return Err(Error::NotNormalized { residual });
    }
    let h = cc_hessian(params, config)?;
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let scale = eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let threshold = tol_zero * scale;

    let kernel: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&k| eig.eigenvalues[k].abs() < threshold)
        .collect();
    if kernel.is_empty() {
        return Err(Error::InconsistentSpectrum(
            "no zero eigenvalue, rotation mode not resolved".into(),
        ));
    }
    let rot = config.rotation_generator().normalize();
    let mut projected = DVector::zeros(rot.len());
    for &k in &kernel {
        let v = eig.eigenvectors.column(k);
        projected += v * v.dot(&rot);
    }
    let leak = (&rot - projected).norm();
    if leak >= 1e-6 {
        return Err(Error::InconsistentSpectrum(format!(
            "rotation generator leaves the numeric kernel (residual {leak:e})"
        )));
    }

    let min_nonzero_abs = eigenvalues
        .iter()
        .filter(|v| v.abs() >= threshold)
        .fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let full_index = eigenvalues.iter().filter(|&&v| v < -threshold).count();
    let reduced_index = if params.all_positive() {
        Some(shape_index(params, config, &h, tol_zero))
    } else {
        None
    };
    Ok(HessianSummary {
        kernel_dim: kernel.len(),
        nondegenerate: kernel.len() == 1,
        eigenvalues,
        min_nonzero_abs,
        full_index,
        reduced_index,
    })
}

/// Index of `M^-1/2 H M^-1/2` on the complement of the gauge directions
/// `M^1/2 {t_x, t_y, q, q_perp}`. Sylvester's law keeps the inertia of `H`.
fn shape_index(
    params: &PotentialParams,
    config: &Configuration,
    h: &DMatrix<f64>,
    tol_zero: f64,
) -> usize {
    let n = config.len();
    let sqrt_m: Vec<f64> = params
        .masses()
        .iter()
        .flat_map(|&m| [m.sqrt(), m.sqrt()])
        .collect();
    let w = DMatrix::from_fn(2 * n, 2 * n, |a, b| h[(a, b)] / (sqrt_m[a] * sqrt_m[b]));
    let q = config.to_flat();
    let rot = config.rotation_generator();
    let gauge = [
        DVector::from_fn(2 * n, |a, _| if a % 2 == 0 { 1.0 } else { 0.0 }),
        DVector::from_fn(2 * n, |a, _| if a % 2 == 1 { 1.0 } else { 0.0 }),
        q,
        rot,
    ];
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for g in gauge {
        let mut v = g.component_mul(&DVector::from_vec(sqrt_m.clone()));
        for b in &basis {
            let c = b.dot(&v);
            v -= b * c;
        }
        let norm = v.norm();
        if norm > 1e-12 {
            basis.push(v / norm);
        }
    }
    let mut proj = DMatrix::identity(2 * n, 2 * n);
    for b in &basis {
        proj -= b * b.transpose();
    }
    let reduced = &proj * w * &proj;
    let reduced = (&reduced + reduced.transpose()) * 0.5;
    let eig = SymmetricEigen::new(reduced);
    let scale = eig.eigenvalues.amax();
    eig.eigenvalues
        .iter()
        .filter(|&&v| v < -tol_zero * scale)
        .count()
}

/// One class of central configurations, represented by a canonical member.
#[derive(Debug, Clone, PartialEq)]
pub struct CentralConfigClass {
    pub id: usize,
    pub config: Configuration,
    pub fingerprint: Fingerprint,
    pub lambda: f64,
    pub residual_inf: f64,
    pub ac_residual_inf: f64,
    pub matrix_residual_fro: f64,
    pub hessian: HessianSummary,
    pub hits: usize,
}

impl CentralConfigClass {
    /// Canonicalizes a converged configuration and evaluates every check.
    pub fn from_solution(
        params: &PotentialParams,
        config: &Configuration,
        hits: usize,
    ) -> Result<Self> {
        let config = canonicalize(params, config)?;
        let hessian = classify_degeneracy(params, &config, KERNEL_TOL)?;
        Ok(CentralConfigClass {
            id: 0,
            fingerprint: fingerprint(params, &config),
            lambda: lambda_of(params, &config)?,
            residual_inf: residual_inf_norm(params, &config)?,
            ac_residual_inf: ac_residual_inf(params, &distances_of(&config)),
            matrix_residual_fro: matrix_residual_fro(params, &config)?,
            hessian,
            hits,
            config,
        })
    }

    pub fn nondegenerate(&self) -> bool {
        self.hessian.nondegenerate
    }

    pub fn is_collinear(&self) -> bool {
        self.fingerprint.is_collinear()
    }

    pub fn full_index(&self) -> usize {
        self.hessian.full_index
    }

    pub fn reduced_index(&self) -> Option<usize> {
        self.hessian.reduced_index
    }

    pub fn kernel_dim(&self) -> usize {
        self.hessian.kernel_dim
    }
}

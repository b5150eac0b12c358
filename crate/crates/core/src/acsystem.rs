//! Mutual-distance (Albouy–Chenciner) form of the central configuration
//! equations.
//!
//! With `S_ij = r_ij^-(alpha+2) - 1/M` (and `S_ii = 0`) a centered configuration
//! with multiplier 1 satisfies `sum_k m_k S_ik (q_k - q_i) = 0` for every `i`.
//! Dotting with `q_j - q_i` and symmetrizing gives one equation per pair that
//! only involves distances.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::geometry::{pairs, Configuration, DistanceVector, PotentialParams};

/// Symmetric matrix `S` with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix(pub DMatrix<f64>);

impl SMatrix {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

/// The matrices `A` (zero column sums) and `B = -r^2/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct ABPair {
    pub a: DMatrix<f64>,
    pub b: DMatrix<f64>,
}

pub fn distances_of(config: &Configuration) -> DistanceVector {
    DistanceVector::of(config)
}

pub fn s_matrix(params: &PotentialParams, distances: &DistanceVector) -> SMatrix {
    let n = distances.n();
    let inv_total = 1.0 / params.total_mass();
    let exponent = params.exponent();
    let mut s = DMatrix::zeros(n, n);
    for (i, j) in pairs(n) {
        let v = distances.get(i, j).powf(-exponent) - inv_total;
        s[(i, j)] = v;
        s[(j, i)] = v;
    }
    SMatrix(s)
}

/// The `(n^2 - n)/2` distance equations `f_ij`, in lexicographic pair order.
pub fn ac_residual(params: &PotentialParams, distances: &DistanceVector) -> Vec<f64> {
    let n = distances.n();
    let s = s_matrix(params, distances);
    let m = params.masses();
    let r2 = |a: usize, b: usize| {
        let r = distances.get(a, b);
        r * r
    };
    pairs(n)
        .map(|(i, j)| {
            let rij2 = r2(i, j);
            (0..n)
                .map(|k| {
                    let (rik2, rjk2) = (r2(i, k), r2(j, k));
                    m[k] * (s.get(i, k) * (rjk2 - rik2 - rij2) + s.get(j, k) * (rik2 - rjk2 - rij2))
                })
                .sum()
        })
        .collect()
}

pub fn ac_residual_inf(params: &PotentialParams, distances: &DistanceVector) -> f64 {
    ac_residual(params, distances)
        .into_iter()
        .fold(0.0, |acc, f| acc.max(f.abs()))
}

pub fn ab_matrices(params: &PotentialParams, config: &Configuration) -> Result<ABPair> {
    // Runs the collision and body-count checks.
    crate::geometry::potential(params, config)?;
    let distances = distances_of(config);
    let n = config.len();
    let s = s_matrix(params, &distances);
    let m = params.masses();
    let mut a = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j {
                a[(i, j)] = m[i] * s.get(i, j);
            }
        }
    }
    for j in 0..n {
        let col: f64 = (0..n).filter(|&k| k != j).map(|k| a[(k, j)]).sum();
        a[(j, j)] = -col;
    }
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * distances.get(i, j).powi(2));
    Ok(ABPair { a, b })
}

/// `P (BA + A^T B) P` with `P` the projector onto zero-sum vectors.
///
/// At a central configuration `BA` has the form `-1 w^T / 2`, so the identity
/// `BA + A^T B = 0` holds as a bilinear form on zero-sum vectors only. The
/// projected matrix vanishes exactly when every pair equation `f_ij` does.
pub fn ac_matrix_residual(pair: &ABPair) -> DMatrix<f64> {
    let n = pair.a.nrows();
    let ba = &pair.b * &pair.a;
    let sym = &ba + ba.transpose();
    let proj = DMatrix::identity(n, n) - DMatrix::from_element(n, n, 1.0 / n as f64);
    let out = &proj * sym * &proj;
    // exact symmetry
    (&out + out.transpose()) * 0.5
}

pub fn matrix_residual_fro(params: &PotentialParams, config: &Configuration) -> Result<f64> {
    Ok(ac_matrix_residual(&ab_matrices(params, config)?).norm())
}

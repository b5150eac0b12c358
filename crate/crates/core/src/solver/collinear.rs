//! Collinear central configurations, one per ordering of the bodies on a line.
//!
//! Positions are parametrized by the leftmost coordinate and the logarithms of
//! the consecutive gaps, so every iterate keeps the prescribed order.

use nalgebra::{DMatrix, DVector, Vector2};

use super::{lm, SolveError, SolverSettings};
use crate::error::Error;
use crate::geometry::{normalize_lambda, residual_inf_norm, Configuration, PotentialParams};

#[derive(Debug, Clone, PartialEq)]
pub struct CollinearSolution {
    pub ordering: Vec<usize>,
    /// On the x-axis, multiplier 1, center at the origin.
    pub config: Configuration,
    pub iterations: usize,
    pub residual_inf: f64,
}

/// Permutations of `0..n` with first entry smaller than last, in
/// lexicographic order: one representative per ordering modulo reversal.
pub fn canonical_orderings(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    loop {
        if n < 2 || current[0] < current[n - 1] {
            out.push(current.clone());
        }
        if !next_permutation(&mut current) {
            break;
        }
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn check_ordering(n: usize, ordering: &[usize]) -> Result<(), Error> {
    if ordering.len() != n {
        return Err(Error::InvalidOrdering(format!(
            "expected {n} entries, got {}",
            ordering.len()
        )));
    }
    let mut seen = vec![false; n];
    for &b in ordering {
        if b >= n || seen[b] {
            return Err(Error::InvalidOrdering(format!(
                "{ordering:?} is not a permutation of 0..{n}"
            )));
        }
        seen[b] = true;
    }
    Ok(())
}

/// Line coordinates `x_b` of every body from `(t, g_1, ..., g_{n-1})`.
fn positions(ordering: &[usize], theta: &DVector<f64>) -> Vec<f64> {
    let mut x = vec![0.0; ordering.len()];
    let mut pos = theta[0];
    x[ordering[0]] = pos;
    for k in 1..ordering.len() {
        pos += theta[k].exp();
        x[ordering[k]] = pos;
    }
    x
}

/// One-dimensional residual `F_i = sum_j m_j sgn(x_j - x_i) / |x_j - x_i|^(alpha+1) + x_i`.
fn line_residual(params: &PotentialParams, x: &[f64]) -> Option<DVector<f64>> {
    let n = x.len();
    let m = params.masses();
    let p = params.alpha() + 1.0;
    let mut out = DVector::from_column_slice(x);
    for i in 0..n {
        for j in i + 1..n {
            let d = x[j] - x[i];
            let f = d.signum() / d.abs().powf(p);
            out[i] += m[j] * f;
            out[j] -= m[i] * f;
        }
    }
    out.iter().all(|v| v.is_finite()).then_some(out)
}

fn theta_jacobian(
    params: &PotentialParams,
    ordering: &[usize],
    theta: &DVector<f64>,
) -> Option<DMatrix<f64>> {
    let n = ordering.len();
    let x = positions(ordering, theta);
    let m = params.masses();
    let a = params.alpha() + 1.0;
    let e = params.exponent();
    let mut jx = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let k = a * m[j] / (x[j] - x[i]).abs().powf(e);
            jx[(i, j)] -= k;
            jx[(i, i)] += k;
        }
    }
    // dx_{ordering[k]}/dt = 1, dx_{ordering[k]}/dg_l = exp(g_l) for 1 <= l <= k
    let mut dx = DMatrix::<f64>::zeros(n, n);
    for (k, &body) in ordering.iter().enumerate() {
        dx[(body, 0)] = 1.0;
        for l in 1..=k {
            dx[(body, l)] = theta[l].exp();
        }
    }
    let j: DMatrix<f64> = jx * dx;
    j.iter().all(|v| v.is_finite()).then_some(j)
}

/// Solves for the collinear class of `ordering`, starting from equal gaps.
pub fn solve_collinear(
    params: &PotentialParams,
    ordering: &[usize],
    settings: &SolverSettings,
) -> Result<CollinearSolution, SolveError> {
    let gaps = vec![1.0; params.n().saturating_sub(1)];
    solve_collinear_from(params, ordering, &gaps, settings)
}

/// As [`solve_collinear`], from consecutive gaps `gaps` (rescaled so that the
/// start has multiplier 1).
pub fn solve_collinear_from(
    params: &PotentialParams,
    ordering: &[usize],
    gaps: &[f64],
    settings: &SolverSettings,
) -> Result<CollinearSolution, SolveError> {
    let n = params.n();
    check_ordering(n, ordering)?;
    if gaps.len() + 1 != n || gaps.iter().any(|g| !(*g > 0.0 && g.is_finite())) {
        return Err(Error::InvalidOrdering("gaps must be n - 1 positive numbers".into()).into());
    }
    let mut x = vec![0.0; n];
    let mut pos = 0.0;
    for (k, &body) in ordering.iter().enumerate() {
        if k > 0 {
            pos += gaps[k - 1];
        }
        x[body] = pos;
    }
    let start = normalize_lambda(params, &to_config(&x))?;
    let sx: Vec<f64> = start.points().iter().map(|p| p.x).collect();
    let mut theta = DVector::zeros(n);
    theta[0] = sx[ordering[0]];
    for k in 1..n {
        theta[k] = (sx[ordering[k]] - sx[ordering[k - 1]]).ln();
    }

    let residual = |t: &DVector<f64>| line_residual(params, &positions(ordering, t));
    let jacobian = |t: &DVector<f64>| theta_jacobian(params, ordering, t);
    let guard = |t: &DVector<f64>, iterations: usize| {
        let x = positions(ordering, t);
        if x.iter()
            .any(|v| !v.is_finite() || v.abs() > settings.max_radius)
        {
            return Err(SolveError::Divergence { iterations });
        }
        if (1..n).any(|k| t[k].exp() < settings.min_separation) {
            return Err(SolveError::CollisionApproach { iterations });
        }
        Ok(())
    };
    let done = lm::solve(theta, settings, residual, jacobian, guard)?;
    let config = to_config(&positions(ordering, &done.x));
    let residual_inf = residual_inf_norm(params, &config)?;
    Ok(CollinearSolution {
        ordering: ordering.to_vec(),
        config,
        iterations: done.iterations,
        residual_inf,
    })
}

fn to_config(x: &[f64]) -> Configuration {
    Configuration::new(x.iter().map(|&v| Vector2::new(v, 0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{fingerprint, same_class, DEDUP_TOL};

    #[test]
    fn orderings_modulo_reversal() {
        assert_eq!(canonical_orderings(2), vec![vec![0, 1]]);
        assert_eq!(
            canonical_orderings(3),
            vec![vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2]]
        );
        assert_eq!(canonical_orderings(4).len(), 12);
        assert_eq!(canonical_orderings(5).len(), 60);
    }

    #[test]
    fn symmetric_three_body() {
        let p = PotentialParams::equal_masses(3, 1.0).unwrap();
        let s = solve_collinear(&p, &[0, 1, 2], &SolverSettings::default()).unwrap();
        let d = 1.25f64.cbrt();
        assert!((s.config.point(0).x + d).abs() < 1e-10);
        assert!((s.config.point(2).x - d).abs() < 1e-10);
        assert!(s.config.point(1).x.abs() < 1e-10);
        assert!(s.residual_inf < 1e-12);
    }

    #[test]
    fn two_body_separation() {
        for &alpha in &[0.0, 1.0, 2.5] {
            let p = PotentialParams::new(alpha, vec![1.0, 3.0]).unwrap();
            let s = solve_collinear(&p, &[0, 1], &SolverSettings::default()).unwrap();
            assert!((s.config.diameter() - 4f64.powf(1.0 / (alpha + 2.0))).abs() < 1e-10);
        }
    }

    #[test]
    fn perturbed_starts_agree() {
        let p = PotentialParams::new(1.0, vec![1.0, 2.0, 0.7, 1.5]).unwrap();
        let settings = SolverSettings::default();
        for ordering in canonical_orderings(4) {
            let base = solve_collinear(&p, &ordering, &settings).unwrap();
            let f0 = fingerprint(&p, &base.config);
            for gaps in [[0.3, 2.0, 1.0], [3.0, 0.5, 0.5], [1.0, 1.0, 4.0]] {
                let other = solve_collinear_from(&p, &ordering, &gaps, &settings).unwrap();
                assert!(same_class(&f0, &fingerprint(&p, &other.config), 1e-9));
            }
        }
    }

    #[test]
    fn four_body_orderings_are_distinct() {
        let p = PotentialParams::equal_masses(4, 1.0).unwrap();
        let fps: Vec<_> = canonical_orderings(4)
            .iter()
            .map(|o| {
                fingerprint(
                    &p,
                    &solve_collinear(&p, o, &SolverSettings::default())
                        .unwrap()
                        .config,
                )
            })
            .collect();
        for a in 0..fps.len() {
            for b in a + 1..fps.len() {
                assert!(!same_class(&fps[a], &fps[b], DEDUP_TOL));
            }
        }
    }

    #[test]
    fn bad_ordering() {
        let p = PotentialParams::equal_masses(3, 1.0).unwrap();
        assert!(matches!(
            solve_collinear(&p, &[0, 0, 1], &SolverSettings::default()),
            Err(SolveError::Invalid(Error::InvalidOrdering(_)))
        ));
    }
}

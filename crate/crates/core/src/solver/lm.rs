//! Damped least-squares iteration shared by the planar and collinear solvers.

use nalgebra::{DMatrix, DVector};

use super::{SolveError, SolverSettings};

/// Singular values below this fraction of the largest are dropped.
const SVD_CUTOFF: f64 = 1e-8;
const DAMPING_FLOOR: f64 = 1e-15;
const DAMPING_CEILING: f64 = 1e10;

pub(crate) struct Converged {
    pub x: DVector<f64>,
    pub iterations: usize,
    pub residual_inf: f64,
}

/// Levenberg–Marquardt on `residual(x) = 0` with a truncated spectral
/// pseudo-inverse, so that structural kernels (the rotation mode) are ignored.
///
/// `residual` returns `None` when `x` is outside the domain; such trial steps are
/// rejected. `guard` is run on every accepted iterate and may abort.
pub(crate) fn solve<R, J, G>(
    x0: DVector<f64>,
    settings: &SolverSettings,
    residual: R,
    jacobian: J,
    guard: G,
) -> Result<Converged, SolveError>
where
    R: Fn(&DVector<f64>) -> Option<DVector<f64>>,
    J: Fn(&DVector<f64>) -> Option<DMatrix<f64>>,
    G: Fn(&DVector<f64>, usize) -> Result<(), SolveError>,
{
    let mut x = x0;
    guard(&x, 0)?;
    let mut r = residual(&x).ok_or(SolveError::CollisionApproach { iterations: 0 })?;
    let mut iterations = 0;
    let mut damping = settings.damping_init;
    loop {
        let r_inf = r.amax();
        if r_inf < settings.tol_residual {
            return Ok(Converged {
                x,
                iterations,
                residual_inf: r_inf,
            });
        }
        if iterations >= settings.max_iters {
            return Err(SolveError::IterationLimit { iterations });
        }
        let jac = jacobian(&x).ok_or(SolveError::CollisionApproach { iterations })?;
        let svd = jac.svd(true, true);
        let (u, v_t) = match (svd.u, svd.v_t) {
            (Some(u), Some(v_t)) => (u, v_t),
            _ => return Err(SolveError::Stalled { iterations }),
        };
        let sigma = svd.singular_values;
        let s_max = sigma.max();
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(SolveError::Stalled { iterations });
        }
        let projected = u.transpose() * &r;
        let r_norm = r.norm();
        loop {
            iterations += 1;
            let lm = damping * s_max * s_max;
            let mut step = DVector::zeros(x.len());
            for k in 0..sigma.len() {
                let s = sigma[k];
                if s < SVD_CUTOFF * s_max {
                    continue;
                }
                let c = s / (s * s + lm) * projected[k];
                step -= v_t.row(k).transpose() * c;
            }
            let trial = &x + step;
            let accepted = residual(&trial).filter(|rt| rt.norm() < r_norm);
            if let Some(rt) = accepted {
                x = trial;
                r = rt;
                damping = (damping * 0.1).max(DAMPING_FLOOR);
                guard(&x, iterations)?;
                break;
            }
            damping *= 10.0;
            if damping > DAMPING_CEILING {
                return Err(SolveError::Stalled { iterations });
            }
            if iterations >= settings.max_iters {
                return Err(SolveError::IterationLimit { iterations });
            }
        }
    }
}

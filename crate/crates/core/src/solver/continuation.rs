//! Natural-parameter continuation of classes in the homogeneity degree.

use nalgebra::SymmetricEigen;

use super::{enumerate, refine, SolveError, SolverSettings};
use crate::classify::{canonicalize, fingerprint, Fingerprint};
use crate::error::Error;
use crate::geometry::{cc_hessian, normalize_lambda, Configuration, PotentialParams};

/// Hessian gap below which a tracked class is reported as degenerating.
pub const DEGENERATION_GAP: f64 = 1e-6;
const MAX_HALVINGS: u32 = 6;
/// Largest accepted change of a mutual distance in one step, relative to the
/// configuration diameter.
const MAX_JUMP: f64 = 0.25;

#[derive(Debug, Clone, PartialEq)]
pub struct TrackPoint {
    pub alpha: f64,
    pub config: Configuration,
    pub fingerprint: Fingerprint,
    /// Smallest `|eigenvalue|` of the Hessian once the rotation mode is removed.
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub class_id: usize,
    pub points: Vec<TrackPoint>,
    /// Set when the track could not be followed past this `alpha`.
    pub lost_at: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerationEvent {
    pub alpha: f64,
    pub class_id: usize,
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationResult {
    pub alphas: Vec<f64>,
    /// Number of classes at each `alpha` (tracked classes for
    /// [`continue_family`], enumerated classes for [`sweep`]).
    pub counts: Vec<usize>,
    pub tracks: Vec<Track>,
    pub events: Vec<DegenerationEvent>,
}

fn check_range(lo: f64, hi: f64) -> Result<(), Error> {
    if !(lo >= 0.0 && hi >= lo && hi.is_finite()) {
        return Err(Error::InvalidSettings(format!(
            "alpha range must satisfy 0 <= alpha_lo <= alpha_hi, got [{lo}, {hi}]"
        )));
    }
    Ok(())
}

fn grid(lo: f64, hi: f64, steps: usize) -> Vec<f64> {
    if lo == hi || steps == 0 {
        return vec![lo];
    }
    (0..=steps)
        .map(|k| {
            if k == steps {
                hi
            } else {
                lo + (hi - lo) * k as f64 / steps as f64
            }
        })
        .collect()
}

/// Smallest Hessian eigenvalue magnitude after discarding the one closest to
/// zero (the rotation mode).
fn hessian_gap(params: &PotentialParams, config: &Configuration) -> Result<f64, Error> {
    let h = cc_hessian(params, config)?;
    let mut abs: Vec<f64> = SymmetricEigen::new(h)
        .eigenvalues
        .iter()
        .map(|v| v.abs())
        .collect();
    abs.sort_by(f64::total_cmp);
    Ok(abs.get(1).copied().unwrap_or(f64::INFINITY))
}

fn max_jump(a: &Configuration, b: &Configuration) -> f64 {
    let fa = crate::acsystem::distances_of(a);
    let fb = crate::acsystem::distances_of(b);
    let diam = a.diameter().max(b.diameter());
    fa.entries()
        .iter()
        .zip(fb.entries())
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        / diam
}

fn step_to(
    params: &PotentialParams,
    from: &Configuration,
    alpha: f64,
    settings: &SolverSettings,
) -> Result<Configuration, SolveError> {
    let target = params.with_alpha(alpha)?;
    // The shape at the previous degree, rescaled to multiplier 1 at the new one.
    let predicted = normalize_lambda(&target, from)?;
    let refined = refine(&target, &predicted, settings)?;
    let next = canonicalize(&target, &refined.config)?;
    if max_jump(from, &next) > MAX_JUMP {
        return Err(SolveError::IterationLimit {
            iterations: refined.iterations,
        });
    }
    Ok(next)
}

fn track_point(
    params: &PotentialParams,
    alpha: f64,
    config: Configuration,
) -> Result<TrackPoint, SolveError> {
    let at = params.with_alpha(alpha)?;
    Ok(TrackPoint {
        alpha,
        min_gap: hessian_gap(&at, &config)?,
        fingerprint: fingerprint(&at, &config),
        config,
    })
}

/// Follows the class of `start` from `alpha_lo` to `alpha_hi` over `steps`
/// equal steps, halving a failed step down to 1/64 of its length.
pub fn continue_family(
    params: &PotentialParams,
    start: &Configuration,
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    settings: &SolverSettings,
) -> Result<ContinuationResult, SolveError> {
    check_range(alpha_lo, alpha_hi)?;
    let track = follow(params, start, 1, alpha_lo, alpha_hi, steps, settings);
    if let Some(alpha) = track.lost_at {
        return Err(SolveError::TrackLost { alpha });
    }
    let alphas = grid(alpha_lo, alpha_hi, steps);
    let events = degeneration_events(&track);
    Ok(ContinuationResult {
        counts: vec![1; alphas.len()],
        alphas,
        tracks: vec![track],
        events,
    })
}

fn follow(
    params: &PotentialParams,
    start: &Configuration,
    class_id: usize,
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    settings: &SolverSettings,
) -> Track {
    let mut track = Track {
        class_id,
        points: Vec::new(),
        lost_at: None,
    };
    let alphas = grid(alpha_lo, alpha_hi, steps);
    let first = params
        .with_alpha(alpha_lo)
        .map_err(SolveError::from)
        .and_then(|p| {
            let r = refine(&p, start, settings)?;
            Ok(canonicalize(&p, &r.config)?)
        })
        .and_then(|c| track_point(params, alpha_lo, c));
    let mut current = match first {
        Ok(point) => {
            let c = point.config.clone();
            track.points.push(point);
            c
        }
        Err(_) => {
            track.lost_at = Some(alpha_lo);
            return track;
        }
    };
    let mut alpha = alpha_lo;
    for &target in alphas.iter().skip(1) {
        let full = target - alpha;
        let mut h = full;
        while alpha < target {
            let next_alpha = if alpha + h >= target - 1e-12 * full.abs() {
                target
            } else {
                alpha + h
            };
            match step_to(params, &current, next_alpha, settings) {
                Ok(next) => {
                    current = next;
                    alpha = next_alpha;
                }
                Err(_) => {
                    h *= 0.5;
                    if h < full / f64::from(1 << MAX_HALVINGS) {
                        track.lost_at = Some(alpha);
                        return track;
                    }
                }
            }
        }
        match track_point(params, target, current.clone()) {
            Ok(point) => track.points.push(point),
            Err(_) => {
                track.lost_at = Some(target);
                return track;
            }
        }
    }
    track
}

fn degeneration_events(track: &Track) -> Vec<DegenerationEvent> {
    track
        .points
        .iter()
        .filter(|p| p.min_gap < DEGENERATION_GAP)
        .map(|p| DegenerationEvent {
            alpha: p.alpha,
            class_id: track.class_id,
            gap: p.min_gap,
        })
        .collect()
}

/// Enumerates at every grid point and follows each class found at `alpha_lo`.
pub fn sweep(
    params: &PotentialParams,
    alpha_lo: f64,
    alpha_hi: f64,
    steps: usize,
    settings: &SolverSettings,
) -> Result<ContinuationResult, SolveError> {
    check_range(alpha_lo, alpha_hi)?;
    let alphas = grid(alpha_lo, alpha_hi, steps);
    let mut counts = Vec::with_capacity(alphas.len());
    let mut initial = Vec::new();
    for (k, &alpha) in alphas.iter().enumerate() {
        let classes = enumerate(&params.with_alpha(alpha)?, settings);
        counts.push(classes.len());
        if k == 0 {
            initial = classes;
        }
    }
    let tracks: Vec<Track> = initial
        .iter()
        .map(|c| follow(params, &c.config, c.id, alpha_lo, alpha_hi, steps, settings))
        .collect();
    let events = tracks.iter().flat_map(degeneration_events).collect();
    Ok(ContinuationResult {
        alphas,
        counts,
        tracks,
        events,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acsystem::distances_of;

    fn equilateral(side: f64) -> Configuration {
        let h = side * 3f64.sqrt() / 2.0;
        Configuration::from_xy(&[
            [0.0, 2.0 * h / 3.0],
            [-side / 2.0, -h / 3.0],
            [side / 2.0, -h / 3.0],
        ])
    }

    #[test]
    fn equilateral_family() {
        let p = PotentialParams::equal_masses(3, 0.0).unwrap();
        let res = continue_family(
            &p,
            &equilateral(3f64.sqrt()),
            0.0,
            3.0,
            31,
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(res.alphas.len(), 32);
        let track = &res.tracks[0];
        assert_eq!(track.points.len(), 32);
        for point in &track.points {
            let side = 3f64.powf(1.0 / (point.alpha + 2.0));
            for r in &point.fingerprint.distances {
                assert!((r - side).abs() < 1e-8);
            }
            assert!(point.min_gap > DEGENERATION_GAP);
        }
        assert!(res.events.is_empty());
    }

    #[test]
    fn two_body_family() {
        let p = PotentialParams::new(0.0, vec![1.0, 2.0]).unwrap();
        let start = Configuration::from_xy(&[[0.0, 0.0], [1.0, 0.0]]);
        let res = continue_family(&p, &start, 0.0, 2.0, 8, &SolverSettings::default()).unwrap();
        for point in &res.tracks[0].points {
            let expected = 3f64.powf(1.0 / (point.alpha + 2.0));
            assert!((point.fingerprint.distances[0] - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn constant_alpha_is_a_no_op() {
        let p = PotentialParams::equal_masses(3, 1.0).unwrap();
        let side = 3f64.cbrt();
        let res = continue_family(
            &p,
            &equilateral(side),
            1.0,
            1.0,
            10,
            &SolverSettings::default(),
        )
        .unwrap();
        assert_eq!(res.alphas, vec![1.0]);
        let end = &res.tracks[0].points.last().unwrap().config;
        for r in distances_of(end).entries() {
            assert!((r - side).abs() < 1e-12);
        }
    }
}

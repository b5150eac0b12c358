//! Finding central configurations: multi-start refinement of the planar
//! residual, a collinear solver per ordering, and continuation in `alpha`.

mod collinear;
mod continuation;
mod lm;

pub use collinear::{
    canonical_orderings, solve_collinear, solve_collinear_from, CollinearSolution,
};
pub use continuation::{
    continue_family, sweep, ContinuationResult, DegenerationEvent, Track, TrackPoint,
    DEGENERATION_GAP,
};

use nalgebra::{DVector, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acsystem::{ac_residual_inf, distances_of};
use crate::classify::{
    canonicalize, compare_fingerprints, fingerprint, same_class, CentralConfigClass, Fingerprint,
    DEDUP_TOL,
};
use crate::error::Error;
use crate::geometry::{
    cc_residual, center_of_mass, residual_inf_norm, residual_jacobian, Configuration,
    PotentialParams,
};

/// Largest distance-equation residual accepted for an enumerated class.
pub const AC_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    pub starts: usize,
    pub seed: u64,
    /// Infinity norm of the normalized residual.
    pub tol_residual: f64,
    pub max_iters: usize,
    pub min_separation: f64,
    pub max_radius: f64,
    /// Inner and outer sampling radius.
    pub annulus: (f64, f64),
    pub damping_init: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            starts: 2000,
            seed: 0,
            tol_residual: 1e-12,
            max_iters: 200,
            min_separation: 1e-8,
            max_radius: 1e3,
            annulus: (0.3, 3.0),
            damping_init: 1e-3,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: &str| Err(Error::InvalidSettings(msg.to_string()));
        if !(self.tol_residual > 0.0) {
            return bad("tol_residual must be positive");
        }
        if self.starts == 0 {
            return bad("starts must be at least 1");
        }
        let (lo, hi) = self.annulus;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return bad("annulus must satisfy 0 <= r_lo < r_hi");
        }
        if !(self.min_separation > 0.0 && self.max_radius > self.min_separation) {
            return bad("min_separation must be positive and below max_radius");
        }
        if !(self.damping_init > 0.0) {
            return bad("damping_init must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Invalid(#[from] Error),
    #[error("iterates left the ball of radius max_radius after {iterations} iterations")]
    Divergence { iterations: usize },
    #[error("bodies approached a collision after {iterations} iterations")]
    CollisionApproach { iterations: usize },
    #[error("no convergence within {iterations} iterations")]
    IterationLimit { iterations: usize },
    #[error("damping saturated without decrease after {iterations} iterations")]
    Stalled { iterations: usize },
    #[error("continuation lost the track at alpha = {alpha}")]
    TrackLost { alpha: f64 },
}

impl SolveError {
    /// Short stable name of the failure kind.
    pub fn code(&self) -> &'static str {
        match self {
            SolveError::Invalid(_) => "invalid",
            SolveError::Divergence { .. } => "divergence",
            SolveError::CollisionApproach { .. } => "collision-approach",
            SolveError::IterationLimit { .. } => "iteration-limit",
            SolveError::Stalled { .. } => "stalled",
            SolveError::TrackLost { .. } => "track-lost",
        }
    }
}

/// A converged central configuration (multiplier 1, center at the origin).
#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub config: Configuration,
    pub iterations: usize,
    pub residual_inf: f64,
}

/// Sample `n` points uniformly (by area) in the annulus and move the center of
/// mass to the origin. The stream is a pure function of `(seed, index)`.
pub fn random_start(
    params: &PotentialParams,
    seed: u64,
    index: u64,
    annulus: (f64, f64),
) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let (lo2, hi2) = (annulus.0 * annulus.0, annulus.1 * annulus.1);
    let points = (0..params.n())
        .map(|_| {
            let r = rng.random_range(lo2..hi2).sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            Vector2::new(r * t.cos(), r * t.sin())
        })
        .collect();
    let config = Configuration::new(points);
    let c = center_of_mass(params, &config).expect("body count matches");
    config.translated(-c)
}

/// Damped least-squares refinement of the planar residual.
pub fn refine(
    params: &PotentialParams,
    config0: &Configuration,
    settings: &SolverSettings,
) -> Result<Refined, SolveError> {
    if config0.len() != params.n() {
        return Err(Error::BodyCountMismatch {
            expected: params.n(),
            got: config0.len(),
        }
        .into());
    }
    let residual = |x: &DVector<f64>| {
        cc_residual(params, &Configuration::from_flat(x))
            .ok()
            .filter(|r| r.iter().all(|v| v.is_finite()))
    };
    let jacobian = |x: &DVector<f64>| residual_jacobian(params, &Configuration::from_flat(x)).ok();
    let guard = |x: &DVector<f64>, iterations: usize| {
        let c = Configuration::from_flat(x);
        if !c.is_finite() || c.max_radius() > settings.max_radius {
            return Err(SolveError::Divergence { iterations });
        }
        if c.min_separation() < settings.min_separation {
            return Err(SolveError::CollisionApproach { iterations });
        }
        Ok(())
    };
    let done = lm::solve(config0.to_flat(), settings, residual, jacobian, guard)?;
    Ok(Refined {
        config: Configuration::from_flat(&done.x),
        iterations: done.iterations,
        residual_inf: done.residual_inf,
    })
}

/// Refines, then canonicalizes; polishes once more if canonicalization pushed
/// the residual over the tolerance.
fn converge_canonical(
    params: &PotentialParams,
    start: &Configuration,
    settings: &SolverSettings,
) -> Result<Configuration, SolveError> {
    let refined = refine(params, start, settings)?;
    let mut canonical = canonicalize(params, &refined.config)?;
    if residual_inf_norm(params, &canonical)? >= settings.tol_residual {
        let again = refine(params, &canonical, settings)?;
        canonical = canonicalize(params, &again.config)?;
        if residual_inf_norm(params, &canonical)? >= settings.tol_residual {
            return Err(SolveError::IterationLimit {
                iterations: again.iterations,
            });
        }
    }
    if ac_residual_inf(params, &distances_of(&canonical)) >= AC_TOL {
        return Err(SolveError::IterationLimit { iterations: 0 });
    }
    Ok(canonical)
}

/// Outcome counts of an enumeration run.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EnumerationStats {
    pub starts: usize,
    pub converged: usize,
    pub divergence: usize,
    pub collision_approach: usize,
    pub iteration_limit: usize,
    pub stalled: usize,
    pub invalid: usize,
    /// Converged representatives whose Hessian could not be classified.
    pub unclassified: usize,
}

impl EnumerationStats {
    fn record(&mut self, err: &SolveError) {
        match err {
            SolveError::Divergence { .. } => self.divergence += 1,
            SolveError::CollisionApproach { .. } => self.collision_approach += 1,
            SolveError::IterationLimit { .. } | SolveError::TrackLost { .. } => {
                self.iteration_limit += 1
            }
            SolveError::Stalled { .. } => self.stalled += 1,
            SolveError::Invalid(_) => self.invalid += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Enumeration {
    pub classes: Vec<CentralConfigClass>,
    pub stats: EnumerationStats,
}

/// Multi-start enumeration, merged by fingerprint and sorted.
pub fn enumerate(params: &PotentialParams, settings: &SolverSettings) -> Vec<CentralConfigClass> {
    enumerate_with_stats(params, settings).classes
}

pub fn enumerate_with_stats(params: &PotentialParams, settings: &SolverSettings) -> Enumeration {
    let outcomes: Vec<Result<(Fingerprint, Configuration), SolveError>> = (0..settings.starts)
        .into_par_iter()
        .map(|index| {
            let start = random_start(params, settings.seed, index as u64, settings.annulus);
            let config = converge_canonical(params, &start, settings)?;
            Ok((fingerprint(params, &config), config))
        })
        .collect();

    let mut stats = EnumerationStats {
        starts: settings.starts,
        ..Default::default()
    };
    let mut merged: Vec<(Fingerprint, Configuration, usize)> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok((fp, config)) => {
                stats.converged += 1;
                match merged
                    .iter_mut()
                    .find(|(f, _, _)| same_class(f, &fp, DEDUP_TOL))
                {
                    Some(entry) => entry.2 += 1,
                    None => merged.push((fp, config, 1)),
                }
            }
            Err(err) => stats.record(&err),
        }
    }

    let built: Vec<Option<CentralConfigClass>> = merged
        .par_iter()
        .map(|(_, config, hits)| CentralConfigClass::from_solution(params, config, *hits).ok())
        .collect();
    let mut classes: Vec<CentralConfigClass> = Vec::with_capacity(built.len());
    for class in built {
        match class {
            Some(c) => classes.push(c),
            None => stats.unclassified += 1,
        }
    }
    sort_and_number(&mut classes);
    Enumeration { classes, stats }
}

/// Sorts classes by fingerprint and assigns ids `1..`.
pub fn sort_and_number(classes: &mut [CentralConfigClass]) {
    classes.sort_by(|a, b| compare_fingerprints(&a.fingerprint, &b.fingerprint, DEDUP_TOL));
    for (k, c) in classes.iter_mut().enumerate() {
        c.id = k + 1;
    }
}

//! Poisson-process candidate knots.
//!
//! Candidates form a `PPP(Gamma)` on `(0, y+)` with `Gamma = gamma / omega`;
//! each is active with probability `omega`, so the active knots are a
//! `PPP(gamma)`. Inactive candidates carry a zero innovation and never
//! change the hazard, which is what allows them to be redrawn from the prior.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::discretise::{poisson, uniform_sorted};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Intensity {
    Fixed { gamma: f64 },
    /// `gamma ~ Gamma(shape, rate)`.
    GammaHyper { shape: f64, rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnotConfig {
    pub omega: f64,
    pub intensity: Intensity,
    /// Right end of the window `(0, window)`, normally `y+`.
    pub window: f64,
}

impl KnotConfig {
    pub fn fixed(gamma: f64, omega: f64, window: f64) -> Self {
        Self {
            omega,
            intensity: Intensity::Fixed { gamma },
            window,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(Error::invalid(format!("omega must lie in (0, 1), got {}", self.omega)));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(Error::invalid("knot window must be positive"));
        }
        match self.intensity {
            Intensity::Fixed { gamma } if gamma >= 0.0 && gamma.is_finite() => Ok(()),
            Intensity::GammaHyper { shape, rate } if shape > 0.0 && rate > 0.0 => Ok(()),
            other => Err(Error::invalid(format!("invalid knot intensity {other:?}"))),
        }
    }

    /// Fixed `gamma`, or the hyperprior mean.
    pub fn initial_gamma(&self) -> f64 {
        match self.intensity {
            Intensity::Fixed { gamma } => gamma,
            Intensity::GammaHyper { shape, rate } => shape / rate,
        }
    }

    /// Dominating intensity `Gamma = gamma / omega`.
    pub fn candidate_intensity(&self, gamma: f64) -> f64 {
        gamma / self.omega
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateKnots {
    pub locations: Vec<f64>,
    pub active: Vec<bool>,
}

impl CandidateKnots {
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn n_active(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn active_locations(&self) -> Vec<f64> {
        self.locations
            .iter()
            .zip(&self.active)
            .filter(|(_, &a)| a)
            .map(|(&l, _)| l)
            .collect()
    }
}

pub fn sample_candidates<R: Rng + ?Sized>(config: &KnotConfig, gamma: f64, rng: &mut R) -> CandidateKnots {
    let big_gamma = config.candidate_intensity(gamma);
    let m = poisson(big_gamma * config.window, rng);
    let locations = uniform_sorted(m, 0.0, config.window, rng);
    let active = (0..m).map(|_| rng.random_bool(config.omega)).collect();
    CandidateKnots { locations, active }
}

/// The candidate set after an inactive-knot refresh. `source[i]` is the
/// index of candidate `i` before the refresh, or `None` for a new knot.
#[derive(Debug, Clone, PartialEq)]
pub struct Refreshed {
    pub candidates: CandidateKnots,
    pub source: Vec<Option<usize>>,
}

/// Keeps the active knots and replaces the inactive ones with a fresh
/// `PPP((1 - omega) Gamma)` draw.
pub fn gibbs_refresh_inactive<R: Rng + ?Sized>(
    candidates: &CandidateKnots,
    config: &KnotConfig,
    gamma: f64,
    rng: &mut R,
) -> Refreshed {
    let rate = (1.0 - config.omega) * config.candidate_intensity(gamma);
    let count = poisson(rate * config.window, rng);
    let fresh = uniform_sorted(count, 0.0, config.window, rng);

    let mut merged: Vec<(f64, Option<usize>)> = candidates
        .locations
        .iter()
        .enumerate()
        .filter(|(i, _)| candidates.active[*i])
        .map(|(i, &l)| (l, Some(i)))
        .chain(fresh.into_iter().map(|l| (l, None)))
        .collect();
    merged.sort_by(|a, b| a.0.total_cmp(&b.0));
    merged.dedup_by(|a, b| a.0 == b.0);

    Refreshed {
        candidates: CandidateKnots {
            locations: merged.iter().map(|m| m.0).collect(),
            active: merged.iter().map(|m| m.1.is_some()).collect(),
        },
        source: merged.into_iter().map(|m| m.1).collect(),
    }
}

/// Conjugate update of `gamma` from the candidate count `m`:
/// `Gamma | m ~ Gamma(shape + m, omega * rate + window)` and `gamma = omega * Gamma`.
pub fn update_intensity<R: Rng + ?Sized>(
    candidate_count: usize,
    config: &KnotConfig,
    rng: &mut R,
) -> Result<f64> {
    let Intensity::GammaHyper { shape, rate } = config.intensity else {
        return Err(Error::invalid("update_intensity needs a Gamma hyperprior"));
    };
    let post_shape = shape + candidate_count as f64;
    let post_rate = config.omega * rate + config.window;
    let g = Gamma::new(post_shape, 1.0 / post_rate)
        .map_err(|e| Error::invalid(format!("gamma posterior: {e}")))?;
    Ok(config.omega * g.sample(rng))
}

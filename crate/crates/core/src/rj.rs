//! Reversible jump baseline for baseline-only models.
//!
//! Each sweep proposes one birth or death, followed by a joint random-walk
//! Metropolis update of the innovations and `sigma`. Births draw the new
//! innovation from its conditional prior, so its density cancels against
//! the prior; what remains is the likelihood ratio, the knot prior, the
//! move probabilities and the drift terms of later innovations whose
//! preceding level moved.

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::knots::Intensity;
use crate::model::{ComponentPrior, ExposureTable, PriorSpec, SigmaPrior};
use crate::posterior::{ComponentDraw, Draw};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KnotSpace {
    /// Knots anywhere in `(0, y+)` with a `PPP(gamma)` prior.
    Continuous,
    /// Knots restricted to fixed candidates, each active with probability `omega`.
    Candidates { locations: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RjConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    /// Random-walk scale for the innovations and `sigma`.
    pub scale: f64,
    pub birth_prob: f64,
    /// Disables birth and death moves.
    pub fixed_dimension: bool,
    pub knot_space: KnotSpace,
}

impl Default for RjConfig {
    fn default() -> Self {
        Self {
            iterations: 100_000,
            burn_in: 10_000,
            thin: 10,
            scale: 0.1,
            birth_prob: 0.5,
            fixed_dimension: false,
            knot_space: KnotSpace::Continuous,
        }
    }
}

impl RjConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0) {
            return Err(Error::invalid("RJ proposal scale must be positive"));
        }
        if !(self.birth_prob > 0.0 && self.birth_prob < 1.0) {
            return Err(Error::invalid("birth probability must lie in (0, 1)"));
        }
        if self.thin == 0 {
            return Err(Error::invalid("thin must be at least 1"));
        }
        Ok(())
    }
}

/// Active knots with their standardised innovations; `theta[0]` is the
/// start level and `theta[j]` belongs to `knots[j - 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RjState {
    pub knots: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma: f64,
    pub gamma: f64,
}

impl RjState {
    pub fn levels(&self) -> Vec<f64> {
        let mut a = Vec::with_capacity(self.theta.len());
        let mut level = self.theta[0];
        a.push(level);
        for t in &self.theta[1..] {
            level += self.sigma * t;
            a.push(level);
        }
        a
    }

    pub fn to_draw(&self, chain: usize, index: usize) -> Draw {
        Draw {
            chain,
            index,
            components: vec![ComponentDraw {
                knots: self.knots.clone(),
                levels: self.levels(),
                sigma: self.sigma,
                gamma: self.gamma,
            }],
        }
    }
}

/// The transdimensional posterior of a baseline-only model.
pub struct RjTarget<'a> {
    prior: &'a ComponentPrior,
    data: &'a Dataset,
    space: KnotSpace,
}

impl<'a> RjTarget<'a> {
    pub fn new(data: &'a Dataset, prior: &'a PriorSpec, space: KnotSpace) -> Result<Self> {
        prior.validate()?;
        if !prior.covariates.is_empty() || data.p() != 0 {
            return Err(Error::invalid("the reversible jump sampler handles baseline-only models"));
        }
        if let KnotSpace::Candidates { locations } = &space {
            let y_plus = data.admin_censor_time;
            if locations.windows(2).any(|w| !(w[0] < w[1])) || locations.iter().any(|&l| !(l > 0.0 && l < y_plus)) {
                return Err(Error::invalid("RJ candidates must be increasing inside (0, y+)"));
            }
        }
        Ok(Self {
            prior: &prior.baseline,
            data,
            space,
        })
    }

    fn y_plus(&self) -> f64 {
        self.data.admin_censor_time
    }

    pub fn log_likelihood(&self, s: &RjState) -> f64 {
        let a = s.levels();
        match ExposureTable::new(self.data, s.knots.clone()) {
            Ok(t) => t.log_likelihood(|_, c| a[c]),
            Err(_) => f64::NEG_INFINITY,
        }
    }

    /// Log prior of everything except the knot configuration.
    fn log_path_prior(&self, s: &RjState) -> f64 {
        let p = self.prior;
        let a = s.levels();
        let mut total = -p.initial.potential(a[0]);
        if let SigmaPrior::Exponential { rate } = p.sigma {
            total -= rate * s.sigma;
        }
        for j in 1..s.theta.len() {
            let m = s.sigma * p.drift.mu(a[j - 1], s.knots[j - 1]);
            total += p.scheme.logpdf(s.theta[j], m);
        }
        total
    }

    fn log_knot_prior(&self, s: &RjState) -> f64 {
        let j = s.knots.len() as f64;
        match &self.space {
            KnotSpace::Continuous => j * s.gamma.ln(),
            KnotSpace::Candidates { locations } => {
                let w = self.prior.knots.omega;
                j * w.ln() + (locations.len() as f64 - j) * (1.0 - w).ln()
            }
        }
    }

    pub fn log_posterior(&self, s: &RjState) -> f64 {
        if !(s.sigma > 0.0) {
            return f64::NEG_INFINITY;
        }
        self.log_likelihood(s) + self.log_path_prior(s) + self.log_knot_prior(s)
    }

    /// Log of the birth-move proposal mass for the knot location, given the current state.
    fn log_birth_location(&self, s: &RjState) -> Option<f64> {
        match &self.space {
            KnotSpace::Continuous => Some(-self.y_plus().ln()),
            KnotSpace::Candidates { locations } => {
                let free = locations.len() - s.knots.len();
                (free > 0).then(|| -(free as f64).ln())
            }
        }
    }

    fn propose_location<R: Rng + ?Sized>(&self, s: &RjState, rng: &mut R) -> Option<f64> {
        match &self.space {
            KnotSpace::Continuous => Some(self.y_plus() * rng.random::<f64>()).filter(|&l| l > 0.0),
            KnotSpace::Candidates { locations } => {
                let free: Vec<f64> = locations.iter().copied().filter(|l| !s.knots.contains(l)).collect();
                (!free.is_empty()).then(|| free[rng.random_range(0..free.len())])
            }
        }
    }

    pub fn initial_state(&self, data: &Dataset) -> RjState {
        let events = data.observations.iter().filter(|o| o.event).count() as f64;
        let exposure: f64 = data.observations.iter().map(|o| o.time).sum();
        RjState {
            knots: Vec::new(),
            theta: vec![if exposure > 0.0 { (events.max(0.5) / exposure).ln() } else { 0.0 }],
            sigma: self.prior.sigma.initial(),
            gamma: self.prior.knots.initial_gamma(),
        }
    }
}

/// Counts of accepted moves.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RjStats {
    pub births_proposed: usize,
    pub births_accepted: usize,
    pub deaths_proposed: usize,
    pub deaths_accepted: usize,
    pub walks_accepted: usize,
    pub sweeps: usize,
}

fn accept<R: Rng + ?Sized>(log_ratio: f64, rng: &mut R) -> bool {
    log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio
}

/// One birth-or-death proposal followed by one random-walk update.
pub fn rj_sweep<R: Rng + ?Sized>(
    state: &mut RjState,
    target: &RjTarget<'_>,
    config: &RjConfig,
    stats: &mut RjStats,
    rng: &mut R,
) {
    let lp = target.log_posterior(state);
    let (pb, pd) = (config.birth_prob, 1.0 - config.birth_prob);
    let mut lp = lp;

    if !config.fixed_dimension {
        if rng.random::<f64>() < pb {
            stats.births_proposed += 1;
            if let (Some(loc), Some(log_q_loc)) = (target.propose_location(state, rng), target.log_birth_location(state)) {
                let j = state.knots.partition_point(|&k| k < loc);
                let a_prev = state.levels()[j];
                let m = state.sigma * target.prior.drift.mu(a_prev, loc);
                let t_new = target.prior.scheme.sample(m, rng);
                let mut prop = state.clone();
                prop.knots.insert(j, loc);
                prop.theta.insert(j + 1, t_new);
                let lp_new = target.log_posterior(&prop);
                let log_q_fwd = pb.ln() + log_q_loc + target.prior.scheme.logpdf(t_new, m);
                let log_q_rev = pd.ln() - (prop.knots.len() as f64).ln();
                if accept(lp_new - lp + log_q_rev - log_q_fwd, rng) {
                    *state = prop;
                    lp = lp_new;
                    stats.births_accepted += 1;
                }
            }
        } else {
            stats.deaths_proposed += 1;
            if !state.knots.is_empty() {
                let j = rng.random_range(0..state.knots.len());
                let mut prop = state.clone();
                let loc = prop.knots.remove(j);
                let t_old = prop.theta.remove(j + 1);
                let a_prev = prop.levels()[j];
                let m = prop.sigma * target.prior.drift.mu(a_prev, loc);
                let lp_new = target.log_posterior(&prop);
                let log_q_fwd = pd.ln() - (state.knots.len() as f64).ln();
                let log_q_rev = match target.log_birth_location(&prop) {
                    Some(l) => pb.ln() + l + target.prior.scheme.logpdf(t_old, m),
                    None => f64::NEG_INFINITY,
                };
                if accept(lp_new - lp + log_q_rev - log_q_fwd, rng) {
                    *state = prop;
                    lp = lp_new;
                    stats.deaths_accepted += 1;
                }
            }
        }
    }

    let mut prop = state.clone();
    for t in prop.theta.iter_mut() {
        let z: f64 = StandardNormal.sample(rng);
        *t += config.scale * z;
    }
    if !target.prior.sigma.is_fixed() {
        let z: f64 = StandardNormal.sample(rng);
        prop.sigma += config.scale * z;
    }
    let lp_new = target.log_posterior(&prop);
    if accept(lp_new - lp, rng) {
        *state = prop;
        stats.walks_accepted += 1;
    }

    if let Intensity::GammaHyper { shape, rate } = target.prior.knots.intensity {
        if matches!(target.space, KnotSpace::Continuous) {
            let post = Gamma::new(shape + state.knots.len() as f64, 1.0 / (rate + target.y_plus()));
            if let Ok(g) = post {
                state.gamma = g.sample(rng);
            }
        }
    }
    stats.sweeps += 1;
}

#[derive(Debug, Clone)]
pub struct RjOutput {
    pub draws: Vec<Draw>,
    pub stats: RjStats,
}

pub fn run_rj<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &PriorSpec,
    config: &RjConfig,
    chain: usize,
    rng: &mut R,
) -> Result<RjOutput> {
    config.validate()?;
    let target = RjTarget::new(data, prior, config.knot_space.clone())?;
    let mut state = target.initial_state(data);
    let mut stats = RjStats::default();
    let mut draws = Vec::new();
    for it in 0..config.burn_in + config.iterations {
        rj_sweep(&mut state, &target, config, &mut stats, rng);
        if it >= config.burn_in && (it - config.burn_in + 1) % config.thin == 0 {
            draws.push(state.to_draw(chain, draws.len()));
        }
    }
    Ok(RjOutput { draws, stats })
}

//! Continuation of posterior hazard paths beyond `y+`.
//!
//! Knots past `y+` follow `PPP(kappa * gamma)` and innovations use the step
//! scale `sigma / sqrt(kappa)`, which keeps the per-unit-time variance
//! `gamma * sigma^2` of the time-changed diffusion for every `kappa`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::discretise::{continue_path, poisson, uniform_sorted};
use crate::error::{Error, Result};
use crate::model::{HazardModel, PriorSpec, StepFunction};
use crate::posterior::{ComponentDraw, Draw};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtrapolationConfig {
    /// `y_inf`; defaults to `5 * y+`.
    #[serde(default)]
    pub horizon: Option<f64>,
    /// `kappa`; by default the smallest integer with `sigma / sqrt(kappa) <= target_sigma`.
    #[serde(default)]
    pub refinement: Option<u32>,
    #[serde(default = "default_target_sigma")]
    pub target_sigma: f64,
}

fn default_target_sigma() -> f64 {
    0.1
}

impl Default for ExtrapolationConfig {
    fn default() -> Self {
        Self {
            horizon: None,
            refinement: None,
            target_sigma: default_target_sigma(),
        }
    }
}

impl ExtrapolationConfig {
    pub fn horizon_for(&self, y_plus: f64) -> f64 {
        self.horizon.unwrap_or(5.0 * y_plus)
    }

    pub fn validate(&self, y_plus: f64) -> Result<()> {
        if !(self.horizon_for(y_plus) > y_plus) {
            return Err(Error::invalid(format!("extrapolation horizon must exceed y+ = {y_plus}")));
        }
        if self.refinement == Some(0) {
            return Err(Error::invalid("refinement factor must be at least 1"));
        }
        if !(self.target_sigma > 0.0) {
            return Err(Error::invalid("target_sigma must be positive"));
        }
        Ok(())
    }
}

pub fn default_refinement(sigma: f64, target_sigma: f64) -> u32 {
    ((sigma / target_sigma).powi(2).ceil() as u32).max(1)
}

fn extend_component<R: Rng + ?Sized>(
    c: &ComponentDraw,
    prior: &crate::model::ComponentPrior,
    y_plus: f64,
    config: &ExtrapolationConfig,
    rng: &mut R,
) -> Result<StepFunction> {
    let horizon = config.horizon_for(y_plus);
    let kappa = config
        .refinement
        .unwrap_or_else(|| default_refinement(c.sigma, config.target_sigma)) as f64;
    let count = poisson(kappa * c.gamma * (horizon - y_plus), rng);
    let new_knots = uniform_sorted(count, y_plus, horizon, rng);
    let last = *c.levels.last().ok_or_else(|| Error::invalid("empty level path"))?;
    let new_levels = continue_path(&prior.drift, prior.scheme, c.sigma / kappa.sqrt(), last, &new_knots, rng);

    let mut knots = Vec::with_capacity(c.knots.len() + count + 2);
    knots.push(0.0);
    knots.extend_from_slice(&c.knots);
    knots.extend_from_slice(&new_knots);
    knots.push(horizon);
    let mut levels = c.levels.clone();
    levels.extend(new_levels);
    StepFunction::new(knots, levels)
}

/// Extends one draw to `(0, y_inf)` using the drifts and schemes in `prior`.
pub fn extrapolate<R: Rng + ?Sized>(
    draw: &Draw,
    prior: &PriorSpec,
    y_plus: f64,
    config: &ExtrapolationConfig,
    rng: &mut R,
) -> Result<HazardModel> {
    config.validate(y_plus)?;
    if draw.components.len() != prior.n_components() {
        return Err(Error::invalid(format!(
            "draw has {} components but the prior describes {}",
            draw.components.len(),
            prior.n_components()
        )));
    }
    let mut steps = draw
        .components
        .iter()
        .zip(prior.components())
        .map(|(c, p)| extend_component(c, p, y_plus, config, rng))
        .collect::<Result<Vec<_>>>()?
        .into_iter();
    let baseline = steps.next().expect("baseline component");
    Ok(HazardModel::with_covariates(baseline, steps.collect()))
}

pub fn extrapolate_all<R: Rng + ?Sized>(
    draws: &[Draw],
    prior: &PriorSpec,
    y_plus: f64,
    config: &ExtrapolationConfig,
    rng: &mut R,
) -> Result<Vec<HazardModel>> {
    draws.iter().map(|d| extrapolate(d, prior, y_plus, config, rng)).collect()
}

//! Piecewise exponential hazard models.
//!
//! The log-hazard is a step function over `(s_{j-1}, s_j]` with `s_0 = 0`;
//! past the last knot the final value persists. Covariate effects are
//! independent step functions with their own knots, summed with the
//! baseline at evaluation.

mod exposure;
mod potential;
mod prior;

pub use exposure::{sufficient_stats, ExposureTable};
pub use potential::{ComponentLayout, Potential};
pub use prior::{ComponentPrior, InitialPrior, PriorSpec, SigmaPrior};

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// A right-continuous-at-knots step function on `(0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    knots: Vec<f64>,
    values: Vec<f64>,
}

impl StepFunction {
    /// `knots` are `s_0 = 0 < s_1 < ... < s_J`; `values[j]` holds on `(s_j, s_{j+1}]`.
    pub fn new(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::invalid("a step function needs at least one interval"));
        }
        if knots[0] != 0.0 {
            return Err(Error::invalid("the first knot must be 0"));
        }
        if knots.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("knots must be strictly increasing"));
        }
        if values.len() != knots.len() - 1 {
            return Err(Error::invalid(format!(
                "{} knots define {} intervals but {} values were given",
                knots.len(),
                knots.len() - 1,
                values.len()
            )));
        }
        Ok(Self { knots, values })
    }

    pub fn constant(value: f64, end: f64) -> Self {
        Self {
            knots: vec![0.0, end],
            values: vec![value],
        }
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn end(&self) -> f64 {
        self.knots[self.knots.len() - 1]
    }

    pub fn interval_index(&self, y: f64) -> usize {
        let interior = &self.knots[1..self.knots.len() - 1];
        interior.partition_point(|&s| s < y)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.values[self.interval_index(y)]
    }

    /// Breakpoints strictly inside `(0, end)` where the value may change.
    fn breaks(&self) -> &[f64] {
        &self.knots[1..self.knots.len() - 1]
    }
}

/// One constant-hazard piece `(lo, hi]` of a covariate-specific profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    pub log_hazard: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HazardModel {
    baseline: StepFunction,
    covariate_effects: Vec<StepFunction>,
}

impl HazardModel {
    pub fn new(knots: Vec<f64>, log_hazards: Vec<f64>) -> Result<Self> {
        Ok(Self {
            baseline: StepFunction::new(knots, log_hazards)?,
            covariate_effects: Vec::new(),
        })
    }

    pub fn with_covariates(baseline: StepFunction, covariate_effects: Vec<StepFunction>) -> Self {
        Self {
            baseline,
            covariate_effects,
        }
    }

    pub fn constant(log_hazard: f64) -> Self {
        Self {
            baseline: StepFunction::constant(log_hazard, 1.0),
            covariate_effects: Vec::new(),
        }
    }

    pub fn knots(&self) -> &[f64] {
        self.baseline.knots()
    }

    pub fn log_hazards(&self) -> &[f64] {
        self.baseline.values()
    }

    pub fn baseline(&self) -> &StepFunction {
        &self.baseline
    }

    pub fn covariate_effects(&self) -> &[StepFunction] {
        &self.covariate_effects
    }

    /// Furthest knot over the baseline and every covariate effect.
    pub fn horizon(&self) -> f64 {
        self.covariate_effects
            .iter()
            .map(StepFunction::end)
            .fold(self.baseline.end(), f64::max)
    }

    fn check_covariates(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.covariate_effects.len() {
            return Err(Error::invalid(format!(
                "model has {} covariate effects but {} covariates were given",
                self.covariate_effects.len(),
                w.len()
            )));
        }
        Ok(())
    }

    fn eta(&self, y: f64, w: &[f64]) -> f64 {
        self.baseline.eval(y)
            + self
                .covariate_effects
                .iter()
                .zip(w)
                .map(|(b, wk)| wk * b.eval(y))
                .sum::<f64>()
    }

    pub fn log_hazard(&self, y: f64, w: &[f64]) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::invalid(format!("log_hazard needs y > 0, got {y}")));
        }
        self.check_covariates(w)?;
        Ok(self.eta(y, w))
    }

    pub fn hazard(&self, y: f64, w: &[f64]) -> Result<f64> {
        self.log_hazard(y, w).map(f64::exp)
    }

    /// The hazard for covariate vector `w` as constant pieces covering `(0, inf)`.
    pub fn profile(&self, w: &[f64]) -> Result<Vec<Piece>> {
        self.check_covariates(w)?;
        let mut breaks: Vec<f64> = self.baseline.breaks().to_vec();
        for (b, &wk) in self.covariate_effects.iter().zip(w) {
            if wk != 0.0 {
                breaks.extend_from_slice(b.breaks());
            }
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let mut pieces = Vec::with_capacity(breaks.len() + 1);
        let mut lo = 0.0;
        for &hi in breaks.iter().chain(std::iter::once(&f64::INFINITY)) {
            let probe = if hi.is_finite() { hi } else { lo + 1.0 };
            pieces.push(Piece {
                lo,
                hi,
                log_hazard: self.eta(probe, w),
            });
            lo = hi;
        }
        Ok(pieces)
    }

    pub fn cumulative_hazard(&self, y: f64, w: &[f64]) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::invalid(format!("cumulative_hazard needs y > 0, got {y}")));
        }
        Ok(cumulative_from_pieces(&self.profile(w)?, y))
    }

    /// `S(y) = exp(-H(y))`, with `S(0) = 1`.
    pub fn survival(&self, y: f64, w: &[f64]) -> Result<f64> {
        if y == 0.0 {
            self.check_covariates(w)?;
            return Ok(1.0);
        }
        Ok((-self.cumulative_hazard(y, w)?).exp())
    }

    /// Restricted mean survival `int_0^cut S(y) dy` in closed form; `cut` may be infinite.
    pub fn mean_survival(&self, w: &[f64], cut: f64) -> Result<f64> {
        if !(cut > 0.0) {
            return Err(Error::invalid(format!("mean survival cut must be positive, got {cut}")));
        }
        Ok(mean_survival_from_pieces(&self.profile(w)?, cut))
    }

    /// Log-likelihood contribution of one observation.
    pub fn observation_log_likelihood(&self, time: f64, event: bool, w: &[f64]) -> Result<f64> {
        let cum = self.cumulative_hazard(time, w)?;
        let lh = if event { self.eta(time, w) } else { 0.0 };
        Ok(lh - cum)
    }

    pub fn log_likelihood(&self, data: &Dataset) -> Result<f64> {
        data.observations
            .iter()
            .map(|o| self.observation_log_likelihood(o.time, o.event, &o.covariates))
            .sum()
    }
}

pub(crate) fn cumulative_from_pieces(pieces: &[Piece], y: f64) -> f64 {
    let mut total = 0.0;
    for p in pieces {
        if p.lo >= y {
            break;
        }
        total += p.log_hazard.exp() * (p.hi.min(y) - p.lo);
    }
    total
}

pub(crate) fn mean_survival_from_pieces(pieces: &[Piece], cut: f64) -> f64 {
    let mut surv_log = 0.0f64;
    let mut total = 0.0;
    for p in pieces {
        if p.lo >= cut {
            break;
        }
        let h = p.log_hazard.exp();
        let width = p.hi.min(cut) - p.lo;
        let s = surv_log.exp();
        if width.is_infinite() {
            total += s / h;
            break;
        }
        // (1 - exp(-h w)) / h, stable for small h w
        total += s * (-(-h * width).exp_m1()) / h;
        surv_log -= h * width;
    }
    total
}

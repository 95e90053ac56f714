use serde::{Deserialize, Serialize};

use crate::discretise::SchemeKind;
use crate::drift::Drift;
use crate::error::{Error, Result};
use crate::knots::KnotConfig;

/// Prior on the level of a component at time 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPrior {
    Normal { sd: f64 },
    /// `exp(level) ~ Gamma(shape, rate)`.
    LogGamma { shape: f64, rate: f64 },
}

impl InitialPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialPrior::Normal { sd } if sd > 0.0 => Ok(()),
            InitialPrior::LogGamma { shape, rate } if shape > 0.0 && rate > 0.0 => Ok(()),
            other => Err(Error::invalid(format!("invalid initial prior {other:?}"))),
        }
    }

    /// Negative log-density up to a constant.
    pub fn potential(&self, a: f64) -> f64 {
        match *self {
            InitialPrior::Normal { sd } => 0.5 * a * a / (sd * sd),
            InitialPrior::LogGamma { shape, rate } => rate * a.exp() - shape * a,
        }
    }

    pub fn potential_grad(&self, a: f64) -> f64 {
        match *self {
            InitialPrior::Normal { sd } => a / (sd * sd),
            InitialPrior::LogGamma { shape, rate } => rate * a.exp() - shape,
        }
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        use rand_distr::{Distribution, Gamma, StandardNormal};
        match *self {
            InitialPrior::Normal { sd } => {
                let z: f64 = StandardNormal.sample(rng);
                sd * z
            }
            InitialPrior::LogGamma { shape, rate } => Gamma::new(shape, 1.0 / rate)
                .map(|g| g.sample(rng).ln())
                .unwrap_or(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaPrior {
    Exponential { rate: f64 },
    /// `sigma` held at a fixed value and not sampled.
    Fixed { value: f64 },
}

impl SigmaPrior {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SigmaPrior::Exponential { rate } if rate > 0.0 => Ok(()),
            SigmaPrior::Fixed { value } if value > 0.0 => Ok(()),
            other => Err(Error::invalid(format!("invalid sigma prior {other:?}"))),
        }
    }

    pub fn is_fixed(&self) -> bool {
        matches!(self, SigmaPrior::Fixed { .. })
    }

    /// Starting value for a chain.
    pub fn initial(&self) -> f64 {
        match *self {
            SigmaPrior::Exponential { .. } => 0.5,
            SigmaPrior::Fixed { value } => value,
        }
    }
}

/// Prior for one diffusion component: the baseline log-hazard or one covariate effect.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentPrior {
    pub drift: Drift,
    pub scheme: SchemeKind,
    pub initial: InitialPrior,
    pub sigma: SigmaPrior,
    pub knots: KnotConfig,
}

impl ComponentPrior {
    /// Skew-symmetric scheme, `Normal(0, 2^2)` start, `Exponential(2)` step scale.
    pub fn new(drift: Drift, knots: KnotConfig) -> Self {
        Self {
            drift,
            scheme: SchemeKind::SkewSymmetric,
            initial: InitialPrior::Normal { sd: 2.0 },
            sigma: SigmaPrior::Exponential { rate: 2.0 },
            knots,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.drift.validate()?;
        self.initial.validate()?;
        self.sigma.validate()?;
        self.knots.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub baseline: ComponentPrior,
    #[serde(default)]
    pub covariates: Vec<ComponentPrior>,
}

impl PriorSpec {
    pub fn baseline_only(baseline: ComponentPrior) -> Self {
        Self {
            baseline,
            covariates: Vec::new(),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = &ComponentPrior> {
        std::iter::once(&self.baseline).chain(&self.covariates)
    }

    pub fn n_components(&self) -> usize {
        1 + self.covariates.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.components().try_for_each(ComponentPrior::validate)
    }
}

//! Drift functions `mu(alpha, y)` of the prior diffusion on the log-hazard.
//!
//! The drift encodes what is believed about the long-term hazard. Langevin
//! variants revert towards the mode of their stationary law; `y` is calendar
//! time and is ignored by the time-homogeneous variants.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A piecewise-linear function of time, held constant outside its points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinear {
    points: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("piecewise-linear table needs at least one point"));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::invalid("piecewise-linear abscissae must be strictly increasing"));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::invalid("piecewise-linear table has non-finite entries"));
        }
        Ok(Self { points })
    }

    pub fn constant(value: f64) -> Self {
        Self {
            points: vec![(0.0, value)],
        }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn eval(&self, x: f64) -> f64 {
        let pts = &self.points;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if x <= first.0 {
            return first.1;
        }
        if x >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= x);
        let (x0, y0) = pts[k - 1];
        let (x1, y1) = pts[k];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn min_value(&self) -> f64 {
        self.points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min)
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinear {
    type Error = Error;
    fn try_from(points: Vec<(f64, f64)>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<PiecewiseLinear> for Vec<(f64, f64)> {
    fn from(p: PiecewiseLinear) -> Self {
        p.points
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Drift {
    /// Brownian motion; the discretised prior is a random walk.
    RandomWalk,
    /// Stationary `Normal(mean, variance)` for the log-hazard.
    GaussianLangevin { mean: f64, variance: f64 },
    /// `mu = shape - rate * exp(alpha)`, reverting to `log(shape / rate)`.
    GammaLangevin { shape: f64, rate: f64 },
    /// Constant drift `psi`: a Gompertz hazard with scale `psi`.
    GompertzLinear { psi: f64 },
    /// Gamma Langevin whose parameters move linearly from `start` to `end`
    /// over `[taper_start, taper_end]`.
    TaperedGammaLangevin {
        start: GammaParams,
        end: GammaParams,
        taper_start: f64,
        taper_end: f64,
    },
    /// Reverts to a time-varying target log-hazard: `-(alpha - mean(y)) / scale^2`.
    CentredMean { mean: PiecewiseLinear, scale: f64 },
    /// Covariate-effect drift: Gaussian Langevin around zero with `variance`
    /// before `wane_start`, then `-beta / scale(y)^2`.
    WaningEffect {
        variance: f64,
        wane_start: f64,
        scale: PiecewiseLinear,
    },
}

impl Drift {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("drift parameter `{name}` must be positive, got {v}")))
            }
        };
        match self {
            Drift::RandomWalk => Ok(()),
            Drift::GaussianLangevin { mean, variance } => {
                if !mean.is_finite() {
                    return Err(Error::invalid("drift mean must be finite"));
                }
                positive("variance", *variance)
            }
            Drift::GammaLangevin { shape, rate } => {
                positive("shape", *shape)?;
                positive("rate", *rate)
            }
            Drift::GompertzLinear { psi } => {
                if psi.is_finite() {
                    Ok(())
                } else {
                    Err(Error::invalid("Gompertz psi must be finite"))
                }
            }
            Drift::TaperedGammaLangevin {
                start,
                end,
                taper_start,
                taper_end,
            } => {
                positive("start.shape", start.shape)?;
                positive("start.rate", start.rate)?;
                positive("end.shape", end.shape)?;
                positive("end.rate", end.rate)?;
                if !(taper_start < taper_end) {
                    return Err(Error::invalid("taper_start must be < taper_end"));
                }
                Ok(())
            }
            Drift::CentredMean { scale, .. } => positive("scale", *scale),
            Drift::WaningEffect {
                variance, scale, ..
            } => {
                positive("variance", *variance)?;
                positive("scale", scale.min_value())
            }
        }
    }

    pub fn is_time_homogeneous(&self) -> bool {
        matches!(
            self,
            Drift::RandomWalk
                | Drift::GaussianLangevin { .. }
                | Drift::GammaLangevin { .. }
                | Drift::GompertzLinear { .. }
        )
    }

    pub fn mu(&self, alpha: f64, y: f64) -> f64 {
        match self {
            Drift::RandomWalk => 0.0,
            Drift::GaussianLangevin { mean, variance } => -(alpha - mean) / (2.0 * variance),
            Drift::GammaLangevin { shape, rate } => shape - rate * alpha.exp(),
            Drift::GompertzLinear { psi } => *psi,
            Drift::TaperedGammaLangevin { .. } => {
                let g = self.tapered_params(y);
                g.shape - g.rate * alpha.exp()
            }
            Drift::CentredMean { mean, scale } => -(alpha - mean.eval(y)) / (scale * scale),
            Drift::WaningEffect {
                variance,
                wane_start,
                scale,
            } => {
                if y < *wane_start {
                    -alpha / (2.0 * variance)
                } else {
                    let s = scale.eval(y);
                    -alpha / (s * s)
                }
            }
        }
    }

    /// Derivative of [`Drift::mu`] with respect to `alpha`.
    pub fn mu_prime(&self, alpha: f64, y: f64) -> f64 {
        match self {
            Drift::RandomWalk | Drift::GompertzLinear { .. } => 0.0,
            Drift::GaussianLangevin { variance, .. } => -1.0 / (2.0 * variance),
            Drift::GammaLangevin { rate, .. } => -rate * alpha.exp(),
            Drift::TaperedGammaLangevin { .. } => -self.tapered_params(y).rate * alpha.exp(),
            Drift::CentredMean { scale, .. } => -1.0 / (scale * scale),
            Drift::WaningEffect {
                variance,
                wane_start,
                scale,
            } => {
                if y < *wane_start {
                    -1.0 / (2.0 * variance)
                } else {
                    let s = scale.eval(y);
                    -1.0 / (s * s)
                }
            }
        }
    }

    fn tapered_params(&self, y: f64) -> GammaParams {
        let Drift::TaperedGammaLangevin {
            start,
            end,
            taper_start,
            taper_end,
        } = self
        else {
            unreachable!("tapered_params on a non-tapered drift")
        };
        let w = ((y - taper_start) / (taper_end - taper_start)).clamp(0.0, 1.0);
        GammaParams {
            shape: start.shape + w * (end.shape - start.shape),
            rate: start.rate + w * (end.rate - start.rate),
        }
    }
}

//! Innovation densities of the discretised prior diffusion.
//!
//! Densities are written in non-centred form: the innovation `theta` is
//! standardised by the step scale `sigma`, and the drift enters through the
//! product `m = sigma * mu`. Euler–Maruyama shifts a standard normal by `m`;
//! the skew-symmetric scheme multiplies it by `1 + tanh(m * theta)`, which
//! integrates to one because `tanh` is odd.

use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::drift::Drift;
use crate::error::{Error, Result};
use crate::model::HazardModel;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn std_normal_logpdf(x: f64) -> f64 {
    -0.5 * x * x - LN_SQRT_2PI
}

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `log(1 + exp(x))` without overflow.
pub(crate) fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    EulerMaruyama,
    SkewSymmetric,
}

impl SchemeKind {
    /// Log-density of a standardised innovation given `m = sigma * mu`.
    pub fn logpdf(self, theta: f64, m: f64) -> f64 {
        match self {
            SchemeKind::EulerMaruyama => std_normal_logpdf(theta - m),
            // log(1 + tanh z) = log 2 - log(1 + exp(-2z))
            SchemeKind::SkewSymmetric => {
                LN_2 - softplus(-2.0 * m * theta) + std_normal_logpdf(theta)
            }
        }
    }

    /// Partial derivatives `(d/dtheta, d/dm)` of [`SchemeKind::logpdf`].
    pub fn logpdf_grad(self, theta: f64, m: f64) -> (f64, f64) {
        match self {
            SchemeKind::EulerMaruyama => (m - theta, theta - m),
            SchemeKind::SkewSymmetric => {
                // 1 - tanh z = 2 / (1 + exp(2z))
                let z = m * theta;
                let one_minus_tanh = 2.0 / (1.0 + (2.0 * z).exp());
                (m * one_minus_tanh - theta, theta * one_minus_tanh)
            }
        }
    }

    /// `innovation_logpdf`: the density of `theta` for drift value `mu` and step scale `sigma`.
    pub fn innovation_logpdf(self, theta: f64, mu: f64, sigma: f64) -> Result<f64> {
        if !(sigma > 0.0) {
            return Err(Error::invalid(format!("step scale must be positive, got {sigma}")));
        }
        Ok(self.logpdf(theta, sigma * mu))
    }

    /// Slab density at zero, `f_0(0 | m)`.
    pub fn density_at_zero(self, m: f64) -> f64 {
        match self {
            SchemeKind::EulerMaruyama => std_normal_pdf(m),
            SchemeKind::SkewSymmetric => std_normal_pdf(0.0),
        }
    }

    /// Draws a standardised innovation given `m = sigma * mu`.
    pub fn sample<R: Rng + ?Sized>(self, m: f64, rng: &mut R) -> f64 {
        let z: f64 = StandardNormal.sample(rng);
        match self {
            SchemeKind::EulerMaruyama => z + m,
            SchemeKind::SkewSymmetric => {
                // keep z with probability (1 + tanh(m z)) / 2 = logistic(2 m z)
                let keep = 1.0 / (1.0 + (-2.0 * m * z).exp());
                if rng.random::<f64>() < keep {
                    z
                } else {
                    -z
                }
            }
        }
    }

    pub fn sample_innovation<R: Rng + ?Sized>(self, mu: f64, sigma: f64, rng: &mut R) -> f64 {
        self.sample(sigma * mu, rng)
    }
}

/// A discretisation with its step scale and the scale of the initial log-hazard.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InnovationScheme {
    pub kind: SchemeKind,
    pub sigma: f64,
    pub sigma0: f64,
}

impl InnovationScheme {
    pub fn new(kind: SchemeKind, sigma: f64, sigma0: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(sigma0 > 0.0) {
            return Err(Error::invalid("sigma and sigma0 must be positive"));
        }
        Ok(Self { kind, sigma, sigma0 })
    }
}

/// Draws a count from `Poisson(mean)`, allowing `mean == 0`.
pub(crate) fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|p| p.sample(rng) as usize).unwrap_or(0)
}

/// Sorted iid uniform locations on `(lo, hi)`.
pub(crate) fn uniform_sorted<R: Rng + ?Sized>(count: usize, lo: f64, hi: f64, rng: &mut R) -> Vec<f64> {
    let mut v: Vec<f64> = (0..count)
        .map(|_| loop {
            let u = lo + (hi - lo) * rng.random::<f64>();
            if u > lo {
                break u;
            }
        })
        .collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Continues a log-hazard path from `start` at the given knot locations.
pub(crate) fn continue_path<R: Rng + ?Sized>(
    drift: &Drift,
    kind: SchemeKind,
    sigma: f64,
    start: f64,
    knots: &[f64],
    rng: &mut R,
) -> Vec<f64> {
    let mut level = start;
    knots
        .iter()
        .map(|&y| {
            let m = sigma * drift.mu(level, y);
            level += sigma * kind.sample(m, rng);
            level
        })
        .collect()
}

/// Simulates one prior hazard path on `(0, y_end)`: Poisson knots with
/// intensity `gamma` and sequential innovations from the scheme.
pub fn simulate_prior_hazard<R: Rng + ?Sized>(
    drift: &Drift,
    scheme: &InnovationScheme,
    gamma: f64,
    y_end: f64,
    rng: &mut R,
) -> Result<HazardModel> {
    if !(gamma > 0.0) || !(y_end > 0.0) {
        return Err(Error::invalid("gamma and y_end must be positive"));
    }
    let count = poisson(gamma * y_end, rng);
    let knots = uniform_sorted(count, 0.0, y_end, rng);
    let z: f64 = StandardNormal.sample(rng);
    let start = scheme.sigma0 * z;
    let mut levels = vec![start];
    levels.extend(continue_path(drift, scheme.kind, scheme.sigma, start, &knots, rng));
    let mut all_knots = vec![0.0];
    all_knots.extend(knots);
    all_knots.push(y_end);
    HazardModel::new(all_knots, levels)
}

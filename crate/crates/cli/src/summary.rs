//! Estimands and diagnostics computed from a draws file.

use dpem_core::posterior::io::Provenance;
use dpem_core::posterior::{extrapolate_all, mcse, mean_survival, mean_survival_difference, psis_loo, pointwise_log_likelihood};
use dpem_core::{Dataset, DatasetSummary, HazardModel, Interval, PosteriorDraws};
use serde::{Deserialize, Serialize};

use crate::config::{Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::run::{by_chain, substream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub provenance: Provenance,
    pub method: Method,
    pub chains: usize,
    pub draws: usize,
    pub data: DatasetSummary,
    pub y_plus: f64,
    pub horizon: f64,
    pub profiles: Vec<ProfileSummary>,
    /// Second profile minus the first, when exactly two are configured.
    pub difference: Option<Estimates>,
    pub diagnostics: Diagnostics,
    /// Absent with fewer than 100 draws.
    pub loo: Option<LooSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub covariates: Vec<f64>,
    pub mean_survival: Estimates,
}

/// Mean survival on `(0, y+)` and on `(0, y_inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimates {
    pub observed: Interval,
    pub horizon: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Effective sample sizes, summed over chains.
    pub ess_mean_survival: f64,
    pub ess_sigma: f64,
    pub ess_knots: f64,
    /// Monte Carlo standard error of the posterior mean of the observed-window mean survival.
    pub mcse_mean_survival: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooSummary {
    pub elpd_loo: f64,
    pub se: f64,
    pub n_high_k: usize,
    pub max_k: f64,
}

pub fn extrapolated_models(cfg: &RunConfig, draws: &PosteriorDraws, seed: u64) -> CliResult<Vec<HazardModel>> {
    let mut rng = substream(seed, "extrapolate");
    Ok(extrapolate_all(&draws.draws, &cfg.prior(), draws.y_plus, &cfg.extrapolation, &mut rng)?)
}

fn ess_sum(chains: &[Vec<f64>]) -> CliResult<f64> {
    let mut total = 0.0;
    for c in chains {
        total += dpem_core::posterior::ess(c)?.ess;
    }
    Ok(total)
}

pub fn summarise(cfg: &RunConfig, data: &Dataset, draws: &PosteriorDraws, provenance: &Provenance) -> CliResult<Summary> {
    if draws.draws.len() < 10 {
        return Err(CliError::Runtime(format!("only {} draws; at least 10 are needed", draws.len())));
    }
    let y_plus = draws.y_plus;
    let horizon = cfg.extrapolation.horizon_for(y_plus);
    let models = draws.models()?;
    let extended = extrapolated_models(cfg, draws, provenance.seed)?;

    let mut profiles = Vec::new();
    let mut per_draw = Vec::new();
    for w in cfg.profiles() {
        let (observed, values) = mean_survival(&models, &w, y_plus)?;
        let (horizon_iv, _) = mean_survival(&extended, &w, horizon)?;
        per_draw.push(values);
        profiles.push(ProfileSummary {
            covariates: w,
            mean_survival: Estimates {
                observed,
                horizon: horizon_iv,
            },
        });
    }
    let difference = if profiles.len() == 2 {
        let (w0, w1) = (&profiles[0].covariates, &profiles[1].covariates);
        Some(Estimates {
            observed: mean_survival_difference((&models, w1), (&models, w0), y_plus)?.0,
            horizon: mean_survival_difference((&extended, w1), (&extended, w0), horizon)?.0,
        })
    } else {
        None
    };

    // diagnostics use the first profile
    let ms = {
        let values = &per_draw[0];
        let mut k = 0;
        by_chain(draws, |_| {
            k += 1;
            values[k - 1]
        })
    };
    let diagnostics = Diagnostics {
        ess_mean_survival: ess_sum(&ms)?,
        ess_sigma: ess_sum(&by_chain(draws, |d| d.baseline().sigma))?,
        ess_knots: ess_sum(&by_chain(draws, |d| d.baseline().knots.len() as f64))?,
        mcse_mean_survival: mcse(&ms)?,
    };

    let loo = if draws.len() >= 100 {
        let r = psis_loo(&pointwise_log_likelihood(&models, data)?)?;
        Some(LooSummary {
            elpd_loo: r.elpd_loo,
            se: r.se,
            n_high_k: r.n_high_k,
            max_k: r.max_k,
        })
    } else {
        None
    };

    Ok(Summary {
        provenance: provenance.clone(),
        method: cfg.sampler.method,
        chains: by_chain(draws, |_| ()).len(),
        draws: draws.len(),
        data: data.summary(),
        y_plus,
        horizon,
        profiles,
        difference,
        diagnostics,
        loo,
    })
}

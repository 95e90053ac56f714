//! Seeded, parallel execution of chains.

use dpem_core::posterior::io::Provenance;
use dpem_core::{load_dataset, run_chain, run_rj, Dataset, Draw, PosteriorDraws, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::config::{Method, RunConfig, SamplerSection};
use crate::error::{CliError, CliResult};

/// Independent generator for the stream `name` of `seed`.
pub fn substream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    ChaCha8Rng::from_seed(h.finalize().into())
}

pub fn load_data(cfg: &RunConfig) -> CliResult<Dataset> {
    let data = load_dataset(&cfg.data.path, cfg.data.y_plus)?;
    Ok(data.select_covariates(&cfg.data.covariates)?)
}

pub fn provenance(cfg: &RunConfig) -> Provenance {
    Provenance {
        config_hash: cfg.hash(),
        seed: cfg.sampler.seed,
    }
}

/// Runs every chain on its own thread; chain `c` uses stream `{tag}/chain/{c}`.
pub fn sample(data: &Dataset, prior: &PriorSpec, sampler: &SamplerSection, tag: &str) -> CliResult<PosteriorDraws> {
    let results: Vec<dpem_core::Result<Vec<Draw>>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..sampler.chains)
            .map(|c| {
                s.spawn(move || {
                    let mut rng = substream(sampler.seed, &format!("{tag}/chain/{c}"));
                    match sampler.method {
                        Method::Pdmp => run_chain(data, prior, &sampler.pdmp, c, &mut rng).map(|o| o.draws),
                        Method::Rj => run_rj(data, prior, &sampler.rj, c, &mut rng).map(|o| o.draws),
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(dpem_core::Error::InvalidArgument("chain panicked".into()))))
            .collect()
    });
    let mut chains = Vec::with_capacity(results.len());
    for r in results {
        chains.push(r.map_err(|e| match e {
            dpem_core::Error::InvalidArgument(m) => CliError::Runtime(m),
            other => other.into(),
        })?);
    }
    Ok(PosteriorDraws::merge(data.admin_censor_time, chains))
}

/// Draws grouped by chain, in chain order.
pub fn by_chain<T>(draws: &PosteriorDraws, mut value: impl FnMut(&Draw) -> T) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = Vec::new();
    let mut current = None;
    for d in &draws.draws {
        if current != Some(d.chain) {
            out.push(Vec::new());
            current = Some(d.chain);
        }
        out.last_mut().expect("group").push(value(d));
    }
    out
}

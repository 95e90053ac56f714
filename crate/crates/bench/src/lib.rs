//! Fixtures shared by the benchmarks.

use std::path::Path;

use dpem_core::pdmp::initial_state;
use dpem_core::{load_dataset, ComponentPrior, Dataset, Drift, KnotConfig, PdmpState, Potential, PriorSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn colon() -> Dataset {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/colon.csv");
    load_dataset(path, 3.0).expect("colon data")
}

/// Baseline random walk with a Gaussian Langevin effect for every covariate.
pub fn colon_prior(data: &Dataset, gamma: f64) -> PriorSpec {
    let baseline = ComponentPrior::new(Drift::RandomWalk, KnotConfig::fixed(gamma, 0.5, data.admin_censor_time));
    let covariates = data
        .covariate_names
        .iter()
        .map(|_| {
            ComponentPrior::new(
                Drift::GaussianLangevin { mean: 0.0, variance: 1.0 },
                KnotConfig::fixed(1.0, 0.5, data.admin_censor_time),
            )
        })
        .collect();
    PriorSpec { baseline, covariates }
}

pub fn colon_state(gamma: f64, seed: u64) -> (Potential, PdmpState, ChaCha8Rng) {
    let data = colon();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (pot, state) = initial_state(&data, &colon_prior(&data, gamma), &mut rng).expect("initial state");
    (pot, state, rng)
}

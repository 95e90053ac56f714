//! Diffusion piecewise exponential survival models.
//!
//! The log-hazard is a step function whose levels follow a discretised
//! diffusion prior over Poisson-process knots. Posterior inference uses a
//! sticky forward event chain sampler, with a reversible-jump sampler as a
//! baseline; the posterior module extends draws beyond the observation
//! window and computes estimands and diagnostics.

pub mod data;
pub mod discretise;
pub mod drift;
mod error;
pub mod knots;
pub mod model;
pub mod pdmp;
pub mod posterior;
pub mod rj;
pub mod stats;

pub use data::{dataset_summary, load_dataset, parse_dataset, Dataset, DatasetSummary, Observation};
pub use discretise::{simulate_prior_hazard, InnovationScheme, SchemeKind};
pub use drift::{Drift, GammaParams, PiecewiseLinear};
pub use error::{Error, Result};
pub use knots::{CandidateKnots, Intensity, KnotConfig};
pub use model::{
    sufficient_stats, ComponentPrior, ExposureTable, HazardModel, InitialPrior, Potential, PriorSpec, SigmaPrior,
    StepFunction,
};
pub use rj::{run_rj, KnotSpace, RjConfig, RjOutput};
pub use pdmp::{run_chain, ChainOutput, CoordKind, PdmpState, PdmpTarget, SamplerConfig};
pub use posterior::{Draw, ExtrapolationConfig, Interval, PosteriorDraws};

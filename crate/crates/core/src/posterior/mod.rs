//! Posterior draws and everything computed from them.

mod draws;
mod ess;
mod estimands;
mod extrapolate;
pub mod io;
mod loo;

pub use draws::{pointwise_log_likelihood, ComponentDraw, Draw, PosteriorDraws};
pub use ess::{ess, mcse, EssResult};
pub use estimands::{
    curve_quantiles, mean_survival, mean_survival_difference, summarise, CurveKind, CurveRow, Interval,
};
pub use extrapolate::{default_refinement, extrapolate, extrapolate_all, ExtrapolationConfig};
pub use loo::{psis_loo, psis_smooth, LooResult, PsisResult};

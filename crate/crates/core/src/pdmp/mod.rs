//! Sticky forward event chain sampler.
//!
//! Velocities live on the unit sphere over the moving coordinates (not
//! stuck, not frozen). Time is advanced by a drift–jump–drift splitting
//! step; sticking, unsticking and boundary reflections are resolved exactly
//! inside the drift phases.

mod chain;
mod integrator;
mod kernel;
mod state;
mod sticky;

pub use chain::{initial_state, run_chain, run_target, ChainOutput, ChainStats, StepReportTotals, TargetRun};
pub use integrator::{flow, splitting_step, SamplerConfig, StepReport};
pub use kernel::{event_rate, forward_reflect, reflect, refresh_velocity, rotate_orthogonal};
pub use state::{CoordKind, PdmpState};
pub use sticky::{exit_speed, mean_abs_component, stick, unstick, unstick_rate};

/// A differentiable potential with optional spike-and-slab coordinates.
pub trait PdmpTarget {
    fn kinds(&self) -> &[CoordKind];

    /// Gradient of the potential at `x`; entries for stuck and frozen
    /// coordinates are ignored by the sampler.
    fn gradient(&self, x: &[f64], stuck: &[bool], grad: &mut [f64]);

    /// Slab-to-spike weight `omega / (1 - omega) * f(0 | x)` of sticky coordinate `i`.
    fn unstick_weight(&self, x: &[f64], stuck: &[bool], i: usize) -> f64;

    fn dim(&self) -> usize {
        self.kinds().len()
    }
}

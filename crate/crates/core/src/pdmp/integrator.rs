use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use super::kernel::{event_rate, forward_reflect, refresh_velocity, rotate_orthogonal};
use super::state::{CoordKind, PdmpState};
use super::sticky::{mean_abs_component, stick, unstick};
use super::PdmpTarget;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    /// Splitting step `dt`.
    pub step: f64,
    /// Rate `lambda_e` of the clock that rotates the velocity orthogonally to the gradient.
    pub refresh_rate: f64,
    /// Residual full-refresh rate `lambda_r`.
    pub residual_refresh: f64,
    /// Sampler time between Gibbs updates of the inactive knots and `gamma`.
    pub gibbs_interval: f64,
    pub burn_in: f64,
    /// Sampler time after burn-in.
    pub total_time: f64,
    /// Sampler time between stored draws.
    pub spacing: f64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            step: 0.05,
            refresh_rate: 1.0,
            residual_refresh: 0.0,
            gibbs_interval: 1.0,
            burn_in: 200.0,
            total_time: 2000.0,
            spacing: 1.0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) {
            return Err(Error::invalid("sampler step must be positive"));
        }
        if !(self.refresh_rate >= 0.0 && self.residual_refresh >= 0.0) {
            return Err(Error::invalid("refresh rates must be non-negative"));
        }
        if !(self.gibbs_interval > 0.0 && self.spacing > 0.0) {
            return Err(Error::invalid("gibbs_interval and spacing must be positive"));
        }
        if !(self.burn_in >= 0.0 && self.total_time > 0.0) {
            return Err(Error::invalid("burn_in must be non-negative and total_time positive"));
        }
        Ok(())
    }

    pub fn n_steps(&self, time: f64) -> usize {
        (time / self.step).round() as usize
    }
}

/// Counts of events in one step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReport {
    pub reflections: usize,
    pub refreshes: usize,
    pub rotations: usize,
    pub sticks: usize,
    pub unsticks: usize,
    pub boundary_hits: usize,
}

impl std::ops::AddAssign for StepReport {
    fn add_assign(&mut self, o: Self) {
        self.reflections += o.reflections;
        self.refreshes += o.refreshes;
        self.rotations += o.rotations;
        self.sticks += o.sticks;
        self.unsticks += o.unsticks;
        self.boundary_hits += o.boundary_hits;
    }
}

enum Hit {
    Stick(usize),
    Boundary(usize),
    Unstick,
    End,
}

/// Linear motion for `duration`, resolving sticking, boundary reflections
/// and unsticking exactly. `stuck_time` (if given) accumulates the time each
/// coordinate spends stuck.
pub fn flow<T: PdmpTarget + ?Sized, R: Rng + ?Sized>(
    state: &mut PdmpState,
    target: &T,
    duration: f64,
    rng: &mut R,
    mut stuck_time: Option<&mut [f64]>,
) -> StepReport {
    let kinds = target.kinds();
    let mut report = StepReport::default();
    let mut remaining = duration;
    let mut weights = vec![0.0; kinds.len()];
    loop {
        let mut total_weight = 0.0;
        for i in 0..kinds.len() {
            weights[i] = if state.stuck[i] {
                target.unstick_weight(&state.x, &state.stuck, i)
            } else {
                0.0
            };
            total_weight += weights[i];
        }
        let mut tau = remaining;
        let mut hit = Hit::End;
        if total_weight > 0.0 {
            let rate = total_weight * mean_abs_component(state.n_moving(kinds) + 1);
            let t_u = Exp::new(rate).map(|e| e.sample(rng)).unwrap_or(f64::INFINITY);
            if t_u < tau {
                tau = t_u;
                hit = Hit::Unstick;
            }
        }
        for i in 0..kinds.len() {
            let (x, v) = (state.x[i], state.v[i]);
            if v == 0.0 {
                continue;
            }
            let crossing = match kinds[i] {
                CoordKind::Sticky if x * v < 0.0 => Some(Hit::Stick(i)),
                CoordKind::Positive if v < 0.0 => Some(Hit::Boundary(i)),
                _ => None,
            };
            if let Some(h) = crossing {
                let t = -x / v;
                if t < tau {
                    tau = t;
                    hit = h;
                }
            }
        }

        for i in 0..kinds.len() {
            state.x[i] += state.v[i] * tau;
        }
        if let Some(st) = stuck_time.as_deref_mut() {
            for i in 0..kinds.len() {
                if state.stuck[i] {
                    st[i] += tau;
                }
            }
        }
        state.time += tau;
        remaining -= tau;

        match hit {
            Hit::End => break,
            Hit::Stick(i) => {
                stick(state, i);
                report.sticks += 1;
            }
            Hit::Boundary(i) => {
                state.x[i] = state.x[i].max(f64::MIN_POSITIVE);
                state.v[i] = -state.v[i];
                report.boundary_hits += 1;
            }
            Hit::Unstick => {
                let mut u = rng.random::<f64>() * total_weight;
                let mut chosen = None;
                for i in 0..kinds.len() {
                    if weights[i] > 0.0 {
                        chosen = Some(i);
                        if u < weights[i] {
                            break;
                        }
                        u -= weights[i];
                    }
                }
                if let Some(i) = chosen {
                    unstick(state, kinds, i, rng);
                    report.unsticks += 1;
                }
            }
        }
    }
    report
}

/// One drift–jump–drift step of length `config.step`.
pub fn splitting_step<T: PdmpTarget + ?Sized, R: Rng + ?Sized>(
    state: &mut PdmpState,
    target: &T,
    config: &SamplerConfig,
    grad: &mut [f64],
    rng: &mut R,
    mut stuck_time: Option<&mut [f64]>,
) -> StepReport {
    let kinds = target.kinds();
    let half = 0.5 * config.step;
    let mut report = flow(state, target, half, rng, stuck_time.as_deref_mut());

    let rotate = config.refresh_rate > 0.0 && rng.random::<f64>() < -(-config.refresh_rate * config.step).exp_m1();
    if state.n_moving(kinds) > 0 {
        target.gradient(&state.x, &state.stuck, grad);
        for i in 0..kinds.len() {
            if !state.is_moving(kinds, i) {
                grad[i] = 0.0;
            }
        }
        if rotate && rotate_orthogonal(state, grad, kinds, rng) {
            report.rotations += 1;
        }
        let rate = event_rate(&state.v, grad, config.residual_refresh);
        if rate > 0.0 && rng.random::<f64>() < -(-rate * config.step).exp_m1() {
            if rng.random::<f64>() * rate < config.residual_refresh {
                refresh_velocity(state, kinds, rng);
                report.refreshes += 1;
            } else if forward_reflect(state, grad, kinds, rng) {
                report.reflections += 1;
            } else {
                report.refreshes += 1;
            }
        }
    }

    report += flow(state, target, half, rng, stuck_time);
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Flat(Vec<CoordKind>, f64);

    impl PdmpTarget for Flat {
        fn kinds(&self) -> &[CoordKind] {
            &self.0
        }
        fn gradient(&self, _x: &[f64], _s: &[bool], g: &mut [f64]) {
            g.iter_mut().for_each(|v| *v = 0.0);
        }
        fn unstick_weight(&self, _x: &[f64], _s: &[bool], _i: usize) -> f64 {
            self.1
        }
    }

    #[test]
    fn zero_gradient_moves_linearly() {
        let t = Flat(vec![CoordKind::Free; 3], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut s = PdmpState::new(vec![0.0; 3], vec![false; 3], t.kinds(), &mut rng);
        let v0 = s.v.clone();
        let cfg = SamplerConfig::default();
        let mut g = vec![0.0; 3];
        let mut total = StepReport::default();
        for _ in 0..100 {
            total += splitting_step(&mut s, &t, &cfg, &mut g, &mut rng, None);
        }
        assert_eq!(total, StepReport::default());
        for i in 0..3 {
            assert!((s.x[i] - v0[i] * 5.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sticks_at_exact_crossing() {
        let t = Flat(vec![CoordKind::Sticky, CoordKind::Free], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = PdmpState::new(vec![0.3, 1.0], vec![false; 2], t.kinds(), &mut rng);
        s.v = vec![-0.6, 0.8];
        let r = flow(&mut s, &t, 1.0, &mut rng, None);
        assert_eq!(r.sticks, 1);
        assert!(s.stuck[0]);
        // crossing at t* = 0.5, after which the free coordinate moves at unit speed
        assert!((s.x[1] - (1.0 + 0.8 * 0.5 + 0.5)).abs() < 1e-12);
        s.check_invariants(t.kinds()).unwrap();
    }

    #[test]
    fn positive_coordinate_reflects() {
        let t = Flat(vec![CoordKind::Positive], 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = PdmpState::new(vec![0.2], vec![false], t.kinds(), &mut rng);
        s.v = vec![-1.0];
        let r = flow(&mut s, &t, 0.5, &mut rng, None);
        assert_eq!(r.boundary_hits, 1);
        assert!((s.x[0] - 0.3).abs() < 1e-12);
        assert_eq!(s.v[0], 1.0);
    }
}

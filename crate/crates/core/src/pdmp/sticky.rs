//! Spike-and-slab dynamics for sphere velocities.
//!
//! When `k` coordinates move, a coordinate hits its hyperplane at a rate
//! proportional to the mean of `|v_i|` under the uniform law on the sphere
//! `S^{k-1}`, which is `c_k = Gamma(k/2) / (sqrt(pi) Gamma((k+1)/2))`.
//! Balancing that flux against unsticking gives the rate
//! `omega / (1 - omega) * f(0) * c_k`, with `k` counted after the release,
//! and a released coordinate leaves with `u^2 ~ Beta(1, (k-1)/2)`.

use rand::Rng;

use super::state::{CoordKind, PdmpState};

/// `E|v_1|` for `v` uniform on the unit sphere in `k` dimensions.
pub fn mean_abs_component(k: usize) -> f64 {
    assert!(k >= 1);
    let (mut c, mut j) = if k % 2 == 1 {
        (1.0, 1)
    } else {
        (2.0 / std::f64::consts::PI, 2)
    };
    while j < k {
        c *= j as f64 / (j + 1) as f64;
        j += 2;
    }
    c
}

/// Speed of a released coordinate when `k` coordinates move afterwards.
pub fn exit_speed<R: Rng + ?Sized>(k: usize, rng: &mut R) -> f64 {
    if k <= 1 {
        return 1.0;
    }
    let u: f64 = rng.random();
    (1.0 - u.powf(2.0 / (k - 1) as f64)).max(0.0).sqrt()
}

/// Release rate of a stuck coordinate with weight `omega / (1 - omega) * f(0)`,
/// given the number of coordinates currently moving.
pub fn unstick_rate(weight: f64, n_moving: usize) -> f64 {
    weight * mean_abs_component(n_moving + 1)
}

/// Freezes coordinate `i` at 0 and rescales the remaining velocity to unit speed.
pub fn stick(state: &mut PdmpState, i: usize) {
    state.x[i] = 0.0;
    state.v[i] = 0.0;
    state.stuck[i] = true;
    state.normalise();
}

/// Releases coordinate `i` with a random sign.
pub fn unstick<R: Rng + ?Sized>(state: &mut PdmpState, kinds: &[CoordKind], i: usize, rng: &mut R) {
    debug_assert!(state.stuck[i]);
    let k = state.n_moving(kinds) + 1;
    let u = exit_speed(k, rng);
    let scale = (1.0 - u * u).sqrt();
    state.v.iter_mut().for_each(|v| *v *= scale);
    state.stuck[i] = false;
    state.x[i] = 0.0;
    state.v[i] = if rng.random_bool(0.5) { u } else { -u };
}

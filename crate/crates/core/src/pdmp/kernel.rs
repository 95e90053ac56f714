//! Velocity kernels for sphere velocities.
//!
//! At a reflection the forward event chain kernel draws the new speed along
//! the gradient from the event-flux law on the sphere, so that `a'^2 ~
//! Beta(1, (k-1)/2)` for `k` moving coordinates, reverses its sign and keeps
//! the orthogonal direction. Specular reflection alone leaves `|a|` fixed,
//! which is not ergodic for rotationally symmetric targets. The orthogonal
//! direction is randomised by a separate clock.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::state::{CoordKind, PdmpState};
use super::sticky::exit_speed;

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `max(0, <v, grad>) + lambda_r`.
pub fn event_rate(v: &[f64], grad: &[f64], residual_refresh: f64) -> f64 {
    dot(v, grad).max(0.0) + residual_refresh
}

/// Specular reflection of `v` off the hyperplane orthogonal to `grad`.
pub fn reflect(v: &mut [f64], grad: &[f64]) {
    let gg = dot(grad, grad);
    if gg == 0.0 {
        return;
    }
    let c = 2.0 * dot(v, grad) / gg;
    v.iter_mut().zip(grad).for_each(|(vi, gi)| *vi -= c * gi);
}

/// Uniform unit velocity over the moving coordinates.
pub fn refresh_velocity<R: Rng + ?Sized>(state: &mut PdmpState, kinds: &[CoordKind], rng: &mut R) {
    state.randomise_velocity(kinds, rng);
}

/// Gaussian direction over the moving coordinates, orthogonal to the unit vector `n`.
fn orthogonal_direction<R: Rng + ?Sized>(state: &PdmpState, kinds: &[CoordKind], n: &[f64], rng: &mut R) -> Vec<f64> {
    let mut z: Vec<f64> = (0..n.len())
        .map(|i| {
            if state.is_moving(kinds, i) {
                StandardNormal.sample(rng)
            } else {
                0.0
            }
        })
        .collect();
    let zn = dot(&z, n);
    z.iter_mut().zip(n).for_each(|(zi, ni)| *zi -= zn * ni);
    z
}

/// Splits `v` into its component `a` along the unit vector `n` and the rest.
fn split(v: &[f64], n: &[f64]) -> (f64, Vec<f64>) {
    let a = dot(v, n);
    (a, v.iter().zip(n).map(|(vi, ni)| vi - a * ni).collect())
}

fn unit(grad: &[f64]) -> Option<Vec<f64>> {
    let gn = dot(grad, grad).sqrt();
    (gn > 0.0).then(|| grad.iter().map(|g| g / gn).collect())
}

/// Forward event chain reflection at an event with gradient `grad`, which
/// must vanish on coordinates that do not move. Returns `false` and
/// refreshes the velocity when `grad` is zero.
pub fn forward_reflect<R: Rng + ?Sized>(
    state: &mut PdmpState,
    grad: &[f64],
    kinds: &[CoordKind],
    rng: &mut R,
) -> bool {
    let Some(n) = unit(grad) else {
        refresh_velocity(state, kinds, rng);
        return false;
    };
    let k = state.n_moving(kinds);
    let (a, mut perp) = split(&state.v, &n);
    let r = dot(&perp, &perp).sqrt();
    let a_new = exit_speed(k, rng);
    let sign = if a > 0.0 { -1.0 } else { 1.0 };
    if r == 0.0 && k > 1 {
        perp = orthogonal_direction(state, kinds, &n, rng);
    }
    let pr = dot(&perp, &perp).sqrt();
    let scale = if pr > 0.0 { (1.0 - a_new * a_new).max(0.0).sqrt() / pr } else { 0.0 };
    for i in 0..state.v.len() {
        state.v[i] = sign * a_new * n[i] + scale * perp[i];
    }
    state.normalise();
    true
}

/// Redraws the direction of the velocity component orthogonal to `grad`
/// uniformly on the half-sphere `<v_perp_new, v_perp_old> >= 0`, keeping
/// the component along `grad` and the orthogonal norm.
/// Returns whether the velocity changed.
pub fn rotate_orthogonal<R: Rng + ?Sized>(state: &mut PdmpState, grad: &[f64], kinds: &[CoordKind], rng: &mut R) -> bool {
    let Some(n) = unit(grad) else {
        return false;
    };
    let (a, perp) = split(&state.v, &n);
    let r = dot(&perp, &perp).sqrt();
    if r == 0.0 {
        return false;
    }
    let z = orthogonal_direction(state, kinds, &n, rng);
    let zr = dot(&z, &z).sqrt();
    if zr == 0.0 {
        return false;
    }
    let sign = if dot(&z, &perp) < 0.0 { -1.0 } else { 1.0 };
    for i in 0..state.v.len() {
        state.v[i] = a * n[i] + sign * r * z[i] / zr;
    }
    state.normalise();
    true
}

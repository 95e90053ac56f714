use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoordKind {
    Free,
    /// Spike-and-slab coordinate with an atom at 0.
    Sticky,
    /// Held fixed; never part of the velocity.
    Frozen,
    /// Confined to `(0, inf)` with reflection at 0.
    Positive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdmpState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub stuck: Vec<bool>,
    pub time: f64,
}

impl PdmpState {
    /// Starts at `x` with a uniform unit velocity over the moving coordinates.
    /// Stuck coordinates are placed at 0.
    pub fn new<R: Rng + ?Sized>(mut x: Vec<f64>, stuck: Vec<bool>, kinds: &[CoordKind], rng: &mut R) -> Self {
        assert_eq!(x.len(), kinds.len());
        assert_eq!(stuck.len(), kinds.len());
        for (xi, &s) in x.iter_mut().zip(&stuck) {
            if s {
                *xi = 0.0;
            }
        }
        let mut state = Self {
            v: vec![0.0; x.len()],
            x,
            stuck,
            time: 0.0,
        };
        state.randomise_velocity(kinds, rng);
        state
    }

    pub fn is_moving(&self, kinds: &[CoordKind], i: usize) -> bool {
        kinds[i] != CoordKind::Frozen && !self.stuck[i]
    }

    pub fn n_moving(&self, kinds: &[CoordKind]) -> usize {
        (0..kinds.len()).filter(|&i| self.is_moving(kinds, i)).count()
    }

    pub fn n_stuck(&self) -> usize {
        self.stuck.iter().filter(|&&s| s).count()
    }

    pub fn speed(&self) -> f64 {
        self.v.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Draws a uniform direction over the moving coordinates.
    pub fn randomise_velocity<R: Rng + ?Sized>(&mut self, kinds: &[CoordKind], rng: &mut R) {
        for i in 0..self.v.len() {
            self.v[i] = if self.is_moving(kinds, i) {
                StandardNormal.sample(rng)
            } else {
                0.0
            };
        }
        self.normalise();
    }

    pub(crate) fn normalise(&mut self) {
        let s = self.speed();
        if s > 0.0 {
            self.v.iter_mut().for_each(|v| *v /= s);
        }
    }

    /// Describes the first violated state invariant, if any.
    pub fn check_invariants(&self, kinds: &[CoordKind]) -> Result<(), String> {
        for i in 0..kinds.len() {
            if self.stuck[i] && (self.x[i] != 0.0 || self.v[i] != 0.0) {
                return Err(format!("stuck coordinate {i} at x={} v={}", self.x[i], self.v[i]));
            }
            if kinds[i] == CoordKind::Frozen && self.v[i] != 0.0 {
                return Err(format!("frozen coordinate {i} has velocity {}", self.v[i]));
            }
            if kinds[i] == CoordKind::Positive && !(self.x[i] > 0.0) {
                return Err(format!("positive coordinate {i} at {}", self.x[i]));
            }
        }
        if self.n_moving(kinds) > 0 && (self.speed() - 1.0).abs() > 1e-9 {
            return Err(format!("speed {}", self.speed()));
        }
        Ok(())
    }
}

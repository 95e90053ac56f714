//! Negative log-posterior of the non-centred model over a fixed candidate set.
//!
//! Each component (baseline, then one per covariate) occupies a block
//! `[theta_0, theta_1, .., theta_M, sigma]` of the flat position vector.
//! Levels are `a_0 = theta_0` and `a_i = a_{i-1} + sigma * theta_i`; a
//! stuck candidate has `theta_i = 0` and leaves the level unchanged.

use crate::data::Dataset;
use crate::discretise::SchemeKind;
use crate::error::{Error, Result};
use crate::model::{ExposureTable, HazardModel, PriorSpec, StepFunction};
use crate::pdmp::{CoordKind, PdmpTarget};

/// Where one component lives in the flat position vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentLayout {
    pub offset: usize,
    pub locations: Vec<f64>,
}

impl ComponentLayout {
    pub fn n_candidates(&self) -> usize {
        self.locations.len()
    }

    pub fn theta0(&self) -> usize {
        self.offset
    }

    /// Index of candidate `j` (1-based, matching `theta_j`).
    pub fn theta(&self, j: usize) -> usize {
        self.offset + j
    }

    pub fn sigma(&self) -> usize {
        self.offset + self.locations.len() + 1
    }

    pub fn len(&self) -> usize {
        self.locations.len() + 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Levels `a_0..a_M` from the block.
    pub fn levels(&self, x: &[f64]) -> Vec<f64> {
        let sigma = x[self.sigma()];
        let mut a = Vec::with_capacity(self.n_candidates() + 1);
        let mut level = x[self.theta0()];
        a.push(level);
        for j in 1..=self.n_candidates() {
            level += sigma * x[self.theta(j)];
            a.push(level);
        }
        a
    }
}

#[derive(Debug, Clone)]
pub struct Potential {
    prior: PriorSpec,
    layouts: Vec<ComponentLayout>,
    table: ExposureTable,
    /// `cell_level[k][c]`: level index of component `k` on cell `c`.
    cell_level: Vec<Vec<usize>>,
    kinds: Vec<CoordKind>,
    window: f64,
}

impl Potential {
    /// `candidates[k]` are the sorted candidate locations of component `k`.
    pub fn new(data: &Dataset, prior: &PriorSpec, candidates: &[Vec<f64>]) -> Result<Self> {
        prior.validate()?;
        if candidates.len() != prior.n_components() {
            return Err(Error::invalid(format!(
                "{} candidate sets for {} components",
                candidates.len(),
                prior.n_components()
            )));
        }
        if data.p() != prior.covariates.len() {
            return Err(Error::invalid(format!(
                "dataset has {} covariates but the prior describes {}",
                data.p(),
                prior.covariates.len()
            )));
        }
        let window = data.admin_censor_time;
        let mut layouts = Vec::with_capacity(candidates.len());
        let mut offset = 0;
        for locs in candidates {
            if locs.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::invalid("candidate knots must be strictly increasing"));
            }
            if locs.iter().any(|&l| !(l > 0.0 && l < window)) {
                return Err(Error::invalid(format!("candidate knots must lie in (0, {window})")));
            }
            let layout = ComponentLayout {
                offset,
                locations: locs.clone(),
            };
            offset += layout.len();
            layouts.push(layout);
        }

        let mut edges: Vec<f64> = candidates.iter().flatten().copied().collect();
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        let table = ExposureTable::new(data, edges)?;
        let cell_level = layouts
            .iter()
            .map(|l| {
                (0..table.n_cells())
                    .map(|c| {
                        if c == 0 {
                            0
                        } else {
                            let lo = table.edges()[c - 1];
                            l.locations.partition_point(|&s| s <= lo)
                        }
                    })
                    .collect()
            })
            .collect();

        let mut kinds = vec![CoordKind::Free; offset];
        for (l, p) in layouts.iter().zip(prior.components()) {
            for j in 1..=l.n_candidates() {
                kinds[l.theta(j)] = CoordKind::Sticky;
            }
            kinds[l.sigma()] = if p.sigma.is_fixed() {
                CoordKind::Frozen
            } else {
                CoordKind::Positive
            };
        }

        Ok(Self {
            prior: prior.clone(),
            layouts,
            table,
            cell_level,
            kinds,
            window,
        })
    }

    pub fn prior(&self) -> &PriorSpec {
        &self.prior
    }

    pub fn layouts(&self) -> &[ComponentLayout] {
        &self.layouts
    }

    pub fn dim(&self) -> usize {
        self.kinds.len()
    }

    pub fn window(&self) -> f64 {
        self.window
    }

    pub fn table(&self) -> &ExposureTable {
        &self.table
    }

    fn check(&self, x: &[f64], stuck: &[bool]) -> Result<()> {
        if x.len() != self.dim() || stuck.len() != self.dim() {
            return Err(Error::invalid("state dimension does not match the potential"));
        }
        for l in &self.layouts {
            if !(x[l.sigma()] > 0.0) {
                return Err(Error::invalid(format!("sigma must be positive, got {}", x[l.sigma()])));
            }
        }
        Ok(())
    }

    fn all_levels(&self, x: &[f64]) -> Vec<Vec<f64>> {
        self.layouts.iter().map(|l| l.levels(x)).collect()
    }

    fn eta(&self, levels: &[Vec<f64>], g: usize, c: usize) -> f64 {
        let w = &self.table.patterns()[g];
        let mut eta = levels[0][self.cell_level[0][c]];
        for k in 1..levels.len() {
            eta += w[k - 1] * levels[k][self.cell_level[k][c]];
        }
        eta
    }

    pub fn log_likelihood(&self, x: &[f64]) -> f64 {
        let levels = self.all_levels(x);
        self.table.log_likelihood(|g, c| self.eta(&levels, g, c))
    }

    /// Log-density of the continuous prior part: start level, step scale and
    /// the slab innovations of the moving candidates. A stuck candidate's
    /// `f(0 | state)` enters only through its release rate.
    pub fn log_prior(&self, x: &[f64], stuck: &[bool]) -> f64 {
        let mut total = 0.0;
        for (l, p) in self.layouts.iter().zip(self.prior.components()) {
            let a = l.levels(x);
            let sigma = x[l.sigma()];
            total -= p.initial.potential(a[0]);
            if let crate::model::SigmaPrior::Exponential { rate } = p.sigma {
                total -= rate * sigma;
            }
            for j in 1..=l.n_candidates() {
                if stuck[l.theta(j)] {
                    continue;
                }
                let m = sigma * p.drift.mu(a[j - 1], l.locations[j - 1]);
                total += p.scheme.logpdf(x[l.theta(j)], m);
            }
        }
        total
    }

    pub fn potential(&self, x: &[f64], stuck: &[bool]) -> Result<f64> {
        self.check(x, stuck)?;
        Ok(-self.log_likelihood(x) - self.log_prior(x, stuck))
    }

    /// Gradient of the potential; stuck and frozen coordinates get 0.
    pub fn gradient(&self, x: &[f64], stuck: &[bool], grad: &mut [f64]) -> Result<()> {
        self.check(x, stuck)?;
        self.gradient_unchecked(x, stuck, grad);
        Ok(())
    }

    fn gradient_unchecked(&self, x: &[f64], stuck: &[bool], grad: &mut [f64]) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let levels = self.all_levels(x);
        let mut g_a: Vec<Vec<f64>> = levels.iter().map(|a| vec![0.0; a.len()]).collect();

        for g in 0..self.table.patterns().len() {
            let w = &self.table.patterns()[g];
            let d = self.table.events(g);
            let e = self.table.exposure(g);
            for c in 0..self.table.n_cells() {
                if d[c] == 0.0 && e[c] == 0.0 {
                    continue;
                }
                let r = e[c] * self.eta(&levels, g, c).exp() - d[c];
                g_a[0][self.cell_level[0][c]] += r;
                for k in 1..levels.len() {
                    g_a[k][self.cell_level[k][c]] += w[k - 1] * r;
                }
            }
        }

        for (k, (l, p)) in self.layouts.iter().zip(self.prior.components()).enumerate() {
            let a = &levels[k];
            let ga = &mut g_a[k];
            let sigma = x[l.sigma()];
            let mut g_sigma = 0.0;
            for j in 1..=l.n_candidates() {
                let i = l.theta(j);
                if stuck[i] {
                    continue;
                }
                let y = l.locations[j - 1];
                let mu = p.drift.mu(a[j - 1], y);
                let (dt, dm) = p.scheme.logpdf_grad(x[i], sigma * mu);
                grad[i] -= dt;
                ga[j - 1] -= dm * sigma * p.drift.mu_prime(a[j - 1], y);
                g_sigma -= dm * mu;
            }
            // suffix sums carry level sensitivities back to the innovations
            let mut suffix = 0.0;
            for j in (1..=l.n_candidates()).rev() {
                suffix += ga[j];
                let i = l.theta(j);
                if !stuck[i] {
                    grad[i] += sigma * suffix;
                    g_sigma += x[i] * suffix;
                }
            }
            suffix += ga[0];
            grad[l.theta0()] = suffix + p.initial.potential_grad(a[0]);
            match p.sigma {
                crate::model::SigmaPrior::Exponential { rate } => grad[l.sigma()] = g_sigma + rate,
                crate::model::SigmaPrior::Fixed { .. } => grad[l.sigma()] = 0.0,
            }
        }
    }

    /// `omega / (1 - omega) * f_0(0 | state)` for a stuck candidate.
    pub fn unstick_weight_at(&self, x: &[f64], i: usize) -> f64 {
        for (l, p) in self.layouts.iter().zip(self.prior.components()) {
            if i > l.theta0() && i < l.sigma() {
                let j = i - l.offset;
                let omega = p.knots.omega;
                let f0 = match p.scheme {
                    SchemeKind::SkewSymmetric => p.scheme.density_at_zero(0.0),
                    SchemeKind::EulerMaruyama => {
                        let a_prev = l.levels(x)[j - 1];
                        let sigma = x[l.sigma()];
                        p.scheme.density_at_zero(sigma * p.drift.mu(a_prev, l.locations[j - 1]))
                    }
                };
                return omega / (1.0 - omega) * f0;
            }
        }
        0.0
    }

    /// Hazard model with only the active (unstuck) candidates as knots.
    pub fn hazard_model(&self, x: &[f64], stuck: &[bool]) -> Result<HazardModel> {
        let steps: Vec<StepFunction> = self
            .layouts
            .iter()
            .map(|l| component_step(l, x, stuck, self.window))
            .collect::<Result<_>>()?;
        let mut it = steps.into_iter();
        let baseline = it.next().expect("baseline component");
        Ok(HazardModel::with_covariates(baseline, it.collect()))
    }
}

/// Step function of one component over `(0, window)` with active knots only.
pub(crate) fn component_step(l: &ComponentLayout, x: &[f64], stuck: &[bool], window: f64) -> Result<StepFunction> {
    let a = l.levels(x);
    let mut knots = vec![0.0];
    let mut values = vec![a[0]];
    for j in 1..=l.n_candidates() {
        if !stuck[l.theta(j)] && x[l.theta(j)] != 0.0 {
            knots.push(l.locations[j - 1]);
            values.push(a[j]);
        }
    }
    knots.push(window);
    StepFunction::new(knots, values)
}

impl PdmpTarget for Potential {
    fn kinds(&self) -> &[CoordKind] {
        &self.kinds
    }

    fn gradient(&self, x: &[f64], stuck: &[bool], grad: &mut [f64]) {
        self.gradient_unchecked(x, stuck, grad);
    }

    fn unstick_weight(&self, x: &[f64], _stuck: &[bool], i: usize) -> f64 {
        self.unstick_weight_at(x, i)
    }
}

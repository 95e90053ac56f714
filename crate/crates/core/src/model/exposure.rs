use crate::data::Dataset;
use crate::error::{Error, Result};

/// Interval sufficient statistics of the piecewise exponential likelihood.
///
/// Cells are `(edge_{c-1}, edge_c]` with an implicit edge at 0 and a final
/// right-open cell. Observations sharing an identical covariate vector are
/// pooled into one pattern, so the log-likelihood of a model whose
/// log-hazard is constant on each cell is
/// `sum_{g,c} d[g][c] * eta[g][c] - e[g][c] * exp(eta[g][c])`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExposureTable {
    edges: Vec<f64>,
    patterns: Vec<Vec<f64>>,
    events: Vec<Vec<f64>>,
    exposure: Vec<Vec<f64>>,
}

impl ExposureTable {
    /// Builds the table for cell edges `edges` (sorted, unique, positive).
    pub fn new(data: &Dataset, edges: Vec<f64>) -> Result<Self> {
        if edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::invalid("cell edges must be sorted and unique"));
        }
        if edges.first().is_some_and(|&e| !(e > 0.0)) {
            return Err(Error::invalid("cell edges must be positive"));
        }

        let mut patterns: Vec<Vec<f64>> = Vec::new();
        let mut members: Vec<Vec<usize>> = Vec::new();
        for (i, obs) in data.observations.iter().enumerate() {
            let key = &obs.covariates;
            let found = patterns.iter().position(|p| {
                p.iter().zip(key).all(|(a, b)| a.to_bits() == b.to_bits())
            });
            match found {
                Some(g) => members[g].push(i),
                None => {
                    patterns.push(key.clone());
                    members.push(vec![i]);
                }
            }
        }
        if patterns.is_empty() {
            patterns.push(vec![0.0; data.p()]);
            members.push(Vec::new());
        }

        let n_cells = edges.len() + 1;
        let mut events = Vec::with_capacity(patterns.len());
        let mut exposure = Vec::with_capacity(patterns.len());
        for idx in &members {
            let mut times: Vec<f64> = idx.iter().map(|&i| data.observations[i].time).collect();
            times.sort_by(f64::total_cmp);
            let mut event_times: Vec<f64> = idx
                .iter()
                .filter(|&&i| data.observations[i].event)
                .map(|&i| data.observations[i].time)
                .collect();
            event_times.sort_by(f64::total_cmp);
            let mut prefix = Vec::with_capacity(times.len() + 1);
            prefix.push(0.0);
            let mut acc = 0.0;
            for &t in &times {
                acc += t;
                prefix.push(acc);
            }

            let mut d = vec![0.0; n_cells];
            let mut e = vec![0.0; n_cells];
            for c in 0..n_cells {
                let lo = if c == 0 { 0.0 } else { edges[c - 1] };
                let hi = edges.get(c).copied().unwrap_or(f64::INFINITY);
                let i_lo = times.partition_point(|&t| t <= lo);
                let i_hi = times.partition_point(|&t| t <= hi);
                let inside = (prefix[i_hi] - prefix[i_lo]) - (i_hi - i_lo) as f64 * lo;
                let beyond = if hi.is_finite() {
                    (times.len() - i_hi) as f64 * (hi - lo)
                } else {
                    0.0
                };
                e[c] = inside + beyond;
                d[c] = (event_times.partition_point(|&t| t <= hi)
                    - event_times.partition_point(|&t| t <= lo)) as f64;
            }
            events.push(d);
            exposure.push(e);
        }
        Ok(Self {
            edges,
            patterns,
            events,
            exposure,
        })
    }

    pub fn edges(&self) -> &[f64] {
        &self.edges
    }

    pub fn n_cells(&self) -> usize {
        self.edges.len() + 1
    }

    pub fn patterns(&self) -> &[Vec<f64>] {
        &self.patterns
    }

    pub fn events(&self, pattern: usize) -> &[f64] {
        &self.events[pattern]
    }

    pub fn exposure(&self, pattern: usize) -> &[f64] {
        &self.exposure[pattern]
    }

    /// Event count and exposure summed over patterns, per cell.
    pub fn totals(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.n_cells();
        let mut d = vec![0.0; n];
        let mut e = vec![0.0; n];
        for g in 0..self.patterns.len() {
            for c in 0..n {
                d[c] += self.events[g][c];
                e[c] += self.exposure[g][c];
            }
        }
        (d, e)
    }

    /// Drops the edges whose `keep` flag is false, summing the statistics of
    /// the cells they separated.
    pub fn merge(&self, keep: &[bool]) -> Result<Self> {
        if keep.len() != self.edges.len() {
            return Err(Error::invalid(format!(
                "merge mask has {} entries for {} edges",
                keep.len(),
                self.edges.len()
            )));
        }
        let edges: Vec<f64> = self
            .edges
            .iter()
            .zip(keep)
            .filter(|(_, &k)| k)
            .map(|(&e, _)| e)
            .collect();
        let n_new = edges.len() + 1;
        let mut events = vec![vec![0.0; n_new]; self.patterns.len()];
        let mut exposure = vec![vec![0.0; n_new]; self.patterns.len()];
        let mut target = 0;
        for c in 0..self.n_cells() {
            for g in 0..self.patterns.len() {
                events[g][target] += self.events[g][c];
                exposure[g][target] += self.exposure[g][c];
            }
            if c < keep.len() && keep[c] {
                target += 1;
            }
        }
        Ok(Self {
            edges,
            patterns: self.patterns.clone(),
            events,
            exposure,
        })
    }

    /// Log-likelihood for linear predictors `eta(pattern, cell)`.
    pub fn log_likelihood(&self, eta: impl Fn(usize, usize) -> f64) -> f64 {
        let mut total = 0.0;
        for g in 0..self.patterns.len() {
            for c in 0..self.n_cells() {
                let e = self.exposure[g][c];
                let d = self.events[g][c];
                if e == 0.0 && d == 0.0 {
                    continue;
                }
                let h = eta(g, c);
                total += d * h - e * h.exp();
            }
        }
        total
    }
}

/// Sufficient statistics on a candidate knot grid within `(0, y+)`.
pub fn sufficient_stats(candidate_knots: &[f64], data: &Dataset) -> Result<ExposureTable> {
    let y_plus = data.admin_censor_time;
    if candidate_knots.iter().any(|&k| !(k > 0.0 && k < y_plus)) {
        return Err(Error::invalid(format!("candidate knots must lie in (0, {y_plus})")));
    }
    if candidate_knots.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("candidate knots must be sorted without duplicates"));
    }
    ExposureTable::new(data, candidate_knots.to_vec())
}

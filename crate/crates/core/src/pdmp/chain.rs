use rand::Rng;

use super::integrator::{splitting_step, SamplerConfig, StepReport};
use super::state::PdmpState;
use super::PdmpTarget;
use crate::data::Dataset;
use crate::error::Result;
use crate::knots::{gibbs_refresh_inactive, sample_candidates, update_intensity, CandidateKnots, Intensity};
use crate::model::{Potential, PriorSpec};
use crate::posterior::{ComponentDraw, Draw};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ChainStats {
    pub steps: usize,
    pub events: StepReportTotals,
    pub gibbs_updates: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepReportTotals {
    pub reflections: usize,
    pub refreshes: usize,
    pub rotations: usize,
    pub sticks: usize,
    pub unsticks: usize,
    pub boundary_hits: usize,
}

impl From<StepReport> for StepReportTotals {
    fn from(r: StepReport) -> Self {
        Self {
            reflections: r.reflections,
            refreshes: r.refreshes,
            rotations: r.rotations,
            sticks: r.sticks,
            unsticks: r.unsticks,
            boundary_hits: r.boundary_hits,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub draws: Vec<Draw>,
    pub stats: ChainStats,
}

/// Everything the model-level chain carries between Gibbs updates.
pub(crate) struct ModelState {
    pub candidates: Vec<CandidateKnots>,
    pub gammas: Vec<f64>,
    pub potential: Potential,
    pub pdmp: PdmpState,
}

fn crude_log_rate(data: &Dataset) -> f64 {
    let events = data.observations.iter().filter(|o| o.event).count() as f64;
    let exposure: f64 = data.observations.iter().map(|o| o.time).sum();
    if exposure > 0.0 {
        (events.max(0.5) / exposure).ln()
    } else {
        0.0
    }
}

/// Fresh candidates from the prior with every candidate stuck at 0; the
/// baseline starts at the crude event rate.
pub(crate) fn initial_model_state<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &PriorSpec,
    rng: &mut R,
) -> Result<ModelState> {
    prior.validate()?;
    let gammas: Vec<f64> = prior.components().map(|c| c.knots.initial_gamma()).collect();
    let candidates: Vec<CandidateKnots> = prior
        .components()
        .zip(&gammas)
        .map(|(c, &g)| {
            let mut cand = sample_candidates(&c.knots, g, rng);
            cand.locations.retain(|&l| l < data.admin_censor_time);
            cand.active = vec![false; cand.locations.len()];
            cand
        })
        .collect();
    let locs: Vec<Vec<f64>> = candidates.iter().map(|c| c.locations.clone()).collect();
    let potential = Potential::new(data, prior, &locs)?;
    let mut x = vec![0.0; potential.dim()];
    let mut stuck = vec![false; potential.dim()];
    for (k, (l, p)) in potential.layouts().iter().zip(prior.components()).enumerate() {
        x[l.theta0()] = if k == 0 { crude_log_rate(data) } else { 0.0 };
        for j in 1..=l.n_candidates() {
            stuck[l.theta(j)] = true;
        }
        x[l.sigma()] = p.sigma.initial();
    }
    let pdmp = PdmpState::new(x, stuck, potential.kinds(), rng);
    Ok(ModelState {
        candidates,
        gammas,
        potential,
        pdmp,
    })
}

/// Sampler state at the start of a chain (exposed for inspection and tests).
pub fn initial_state<R: Rng + ?Sized>(data: &Dataset, prior: &PriorSpec, rng: &mut R) -> Result<(Potential, PdmpState)> {
    let s = initial_model_state(data, prior, rng)?;
    Ok((s.potential, s.pdmp))
}

/// Redraws `gamma` (under a hyperprior) and the inactive candidates of each
/// component, then rebuilds the potential and remaps the sampler state.
pub(crate) fn gibbs_update<R: Rng + ?Sized>(
    state: &mut ModelState,
    data: &Dataset,
    prior: &PriorSpec,
    rng: &mut R,
) -> Result<()> {
    let old_layouts = state.potential.layouts().to_vec();
    let mut new_locs = Vec::with_capacity(old_layouts.len());
    let mut sources = Vec::with_capacity(old_layouts.len());
    for (k, (l, p)) in old_layouts.iter().zip(prior.components()).enumerate() {
        let cand = CandidateKnots {
            locations: l.locations.clone(),
            active: (1..=l.n_candidates()).map(|j| !state.pdmp.stuck[l.theta(j)]).collect(),
        };
        if matches!(p.knots.intensity, Intensity::GammaHyper { .. }) {
            state.gammas[k] = update_intensity(cand.len(), &p.knots, rng)?;
        }
        let r = gibbs_refresh_inactive(&cand, &p.knots, state.gammas[k], rng);
        // candidates at y+ or beyond carry no information about the data window
        let (mut locs, mut src) = (Vec::new(), Vec::new());
        for (loc, s) in r.candidates.locations.iter().zip(r.source) {
            if *loc < data.admin_censor_time {
                locs.push(*loc);
                src.push(s);
            }
        }
        state.candidates[k] = CandidateKnots {
            active: src.iter().map(|s| s.is_some()).collect(),
            locations: locs.clone(),
        };
        new_locs.push(locs);
        sources.push(src);
    }
    let potential = Potential::new(data, prior, &new_locs)?;
    let dim = potential.dim();
    let (mut x, mut v, mut stuck) = (vec![0.0; dim], vec![0.0; dim], vec![true; dim]);
    let old = &state.pdmp;
    for ((ol, nl), src) in old_layouts.iter().zip(potential.layouts()).zip(&sources) {
        for (oi, ni) in [(ol.theta0(), nl.theta0()), (ol.sigma(), nl.sigma())] {
            x[ni] = old.x[oi];
            v[ni] = old.v[oi];
            stuck[ni] = old.stuck[oi];
        }
        for (j, s) in src.iter().enumerate() {
            let ni = nl.theta(j + 1);
            if let Some(oj) = s {
                let oi = ol.theta(oj + 1);
                x[ni] = old.x[oi];
                v[ni] = old.v[oi];
                stuck[ni] = false;
            }
        }
    }
    state.pdmp = PdmpState {
        x,
        v,
        stuck,
        time: old.time,
    };
    state.potential = potential;
    Ok(())
}

pub(crate) fn snapshot(state: &ModelState, chain: usize, index: usize) -> Result<Draw> {
    let model = state.potential.hazard_model(&state.pdmp.x, &state.pdmp.stuck)?;
    let steps = std::iter::once(model.baseline()).chain(model.covariate_effects());
    let components = steps
        .zip(state.potential.layouts())
        .zip(&state.gammas)
        .map(|((s, l), &gamma)| ComponentDraw {
            knots: s.knots()[1..s.knots().len() - 1].to_vec(),
            levels: s.values().to_vec(),
            sigma: state.pdmp.x[l.sigma()],
            gamma,
        })
        .collect();
    Ok(Draw {
        chain,
        index,
        components,
    })
}

/// Runs one chain: burn-in, then a draw every `spacing` units of sampler time.
pub fn run_chain<R: Rng + ?Sized>(
    data: &Dataset,
    prior: &PriorSpec,
    config: &SamplerConfig,
    chain: usize,
    rng: &mut R,
) -> Result<ChainOutput> {
    config.validate()?;
    let mut state = initial_model_state(data, prior, rng)?;
    let burn = config.n_steps(config.burn_in);
    let total = burn + config.n_steps(config.total_time);
    let every_draw = config.n_steps(config.spacing).max(1);
    let every_gibbs = config.n_steps(config.gibbs_interval).max(1);
    let mut stats = ChainStats::default();
    let mut report = StepReport::default();
    let mut draws = Vec::new();
    let mut grad = vec![0.0; state.potential.dim()];
    for step in 1..=total {
        if grad.len() != state.potential.dim() {
            grad.resize(state.potential.dim(), 0.0);
        }
        report += splitting_step(&mut state.pdmp, &state.potential, config, &mut grad, rng, None);
        if step % every_gibbs == 0 {
            gibbs_update(&mut state, data, prior, rng)?;
            stats.gibbs_updates += 1;
        }
        if step > burn && (step - burn) % every_draw == 0 {
            draws.push(snapshot(&state, chain, draws.len())?);
        }
    }
    stats.steps = total;
    stats.events = report.into();
    Ok(ChainOutput { draws, stats })
}

/// Totals from [`run_target`], counted after burn-in.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TargetRun {
    /// Time each coordinate spent stuck.
    pub stuck_time: Vec<f64>,
    pub elapsed: f64,
    pub report: StepReport,
}

impl TargetRun {
    pub fn stuck_fraction(&self, i: usize) -> f64 {
        self.stuck_time[i] / self.elapsed
    }
}

/// Runs the sampler on a fixed target. `observe` sees the state after
/// every step past burn-in.
pub fn run_target<T: PdmpTarget + ?Sized, R: Rng + ?Sized>(
    target: &T,
    config: &SamplerConfig,
    state: &mut PdmpState,
    rng: &mut R,
    mut observe: impl FnMut(&PdmpState),
) -> Result<TargetRun> {
    config.validate()?;
    let mut grad = vec![0.0; target.dim()];
    for _ in 0..config.n_steps(config.burn_in) {
        splitting_step(state, target, config, &mut grad, rng, None);
    }
    let mut run = TargetRun {
        stuck_time: vec![0.0; target.dim()],
        ..Default::default()
    };
    let start = state.time;
    for _ in 0..config.n_steps(config.total_time) {
        run.report += splitting_step(state, target, config, &mut grad, rng, Some(&mut run.stuck_time));
        observe(state);
    }
    run.elapsed = state.time - start;
    Ok(run)
}

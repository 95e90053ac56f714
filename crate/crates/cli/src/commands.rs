//! Subcommand implementations. Each writes its files into `out` and
//! returns a short report for the terminal.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use dpem_core::posterior::io::{read_draws, write_curves, write_draws, write_json, Provenance};
use dpem_core::posterior::{curve_quantiles, mcse, CurveKind};
use dpem_core::{
    simulate_prior_hazard, Dataset, Drift, HazardModel, InitialPrior, InnovationScheme, Intensity, PosteriorDraws,
    SigmaPrior,
};
use rand_distr::{Distribution, Exp, Gamma};
use serde::{Deserialize, Serialize};

use crate::config::{Method, RunConfig};
use crate::error::{CliError, CliResult};
use crate::run::{by_chain, load_data, provenance, sample, substream};
use crate::summary::{extrapolated_models, summarise, Summary};

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| CliError::output(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::output(path, e))
}

fn finish(mut w: BufWriter<File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| CliError::output(path, e))
}

fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> dpem_core::Result<()>) -> CliResult<()> {
    let mut w = create(path)?;
    f(&mut w).map_err(|e| CliError::output(path, e))?;
    finish(w, path)
}

fn grid(end: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| end * i as f64 / points as f64).collect()
}

fn suffix(i: usize) -> String {
    if i == 0 {
        String::new()
    } else {
        format!("_p{i}")
    }
}

fn write_curve_set(
    cfg: &RunConfig,
    models: &[HazardModel],
    end: f64,
    stem: &str,
    out: &Path,
    prov: &Provenance,
) -> CliResult<Vec<PathBuf>> {
    let g = grid(end, cfg.output.grid_points);
    let mut written = Vec::new();
    for (i, w) in cfg.profiles().iter().enumerate() {
        for (kind, name) in [(CurveKind::Hazard, "hazard"), (CurveKind::Survival, "survival")] {
            let rows = curve_quantiles(models, &g, w, kind)?;
            let path = out.join(format!("{name}{stem}{}.csv", suffix(i)));
            write_with(&path, |f| write_curves(f, &rows, prov))?;
            written.push(path);
        }
    }
    Ok(written)
}

fn write_summary(path: &Path, s: &Summary) -> CliResult<()> {
    write_with(path, |f| write_json(f, s))
}

fn report(s: &Summary) -> String {
    let mut lines = vec![format!("{} draws from {} chains", s.draws, s.chains)];
    for p in &s.profiles {
        let (o, h) = (&p.mean_survival.observed, &p.mean_survival.horizon);
        lines.push(format!(
            "w={:?}: E[Y](0,{}) = {:.3} ({:.3}, {:.3}); E[Y](0,{}) = {:.3} ({:.3}, {:.3})",
            p.covariates, s.y_plus, o.median, o.lower, o.upper, s.horizon, h.median, h.lower, h.upper
        ));
    }
    if let Some(l) = &s.loo {
        lines.push(format!("elpd_loo = {:.2} (se {:.2}), max k = {:.2}", l.elpd_loo, l.se, l.max_k));
    }
    lines.join("\n")
}

pub fn fit(cfg: &RunConfig, out: &Path) -> CliResult<String> {
    let data = load_data(cfg)?;
    let prov = provenance(cfg);
    let draws = sample(&data, &cfg.prior(), &cfg.sampler, "fit")?;
    let draws_path = out.join("draws.csv");
    write_with(&draws_path, |f| write_draws(f, &draws, &prov))?;
    // summarise what was written, so that `summary` reproduces it exactly
    summary(cfg, &draws_path, out)
}

fn read_draws_file(path: &Path) -> CliResult<(PosteriorDraws, Provenance)> {
    let file = File::open(path).map_err(|e| CliError::missing(path, e))?;
    let (draws, prov) = read_draws(std::io::BufReader::new(file))?;
    let prov = prov.ok_or_else(|| CliError::Data(format!("{}: no provenance line", path.display())))?;
    Ok((draws, prov))
}

pub fn summary(cfg: &RunConfig, draws_path: &Path, out: &Path) -> CliResult<String> {
    let data = load_data(cfg)?;
    let (draws, prov) = read_draws_file(draws_path)?;
    let s = summarise(cfg, &data, &draws, &prov)?;
    write_summary(&out.join("summary.json"), &s)?;
    write_curve_set(cfg, &draws.models()?, draws.y_plus, "", out, &prov)?;
    Ok(report(&s))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtrapolationReport {
    pub provenance: Provenance,
    pub horizon: f64,
    pub profiles: Vec<Vec<f64>>,
    pub mean_survival: Vec<dpem_core::Interval>,
}

pub fn extrapolate(cfg: &RunConfig, draws_path: &Path, out: &Path) -> CliResult<String> {
    let (draws, prov) = read_draws_file(draws_path)?;
    let horizon = cfg.extrapolation.horizon_for(draws.y_plus);
    let models = extrapolated_models(cfg, &draws, prov.seed)?;
    write_curve_set(cfg, &models, horizon, "_extrapolated", out, &prov)?;
    let mut mean_survival = Vec::new();
    for w in cfg.profiles() {
        mean_survival.push(dpem_core::posterior::mean_survival(&models, &w, horizon)?.0);
    }
    let rep = ExtrapolationReport {
        provenance: prov,
        horizon,
        profiles: cfg.profiles(),
        mean_survival,
    };
    write_with(&out.join("extrapolation.json"), |f| write_json(f, &rep))?;
    let lines: Vec<String> = rep
        .profiles
        .iter()
        .zip(&rep.mean_survival)
        .map(|(w, m)| format!("w={w:?}: E[Y](0,{horizon}) = {:.3} ({:.3}, {:.3})", m.median, m.lower, m.upper))
        .collect();
    Ok(lines.join("\n"))
}

/// Prior hazard paths for the baseline prior, or for each drift in `drifts`.
pub fn prior_sim(cfg: &RunConfig, drifts: &[Drift], paths: usize, horizon: Option<f64>, out: &Path) -> CliResult<String> {
    let base = cfg.prior().baseline;
    let sigma0 = match base.initial {
        InitialPrior::Normal { sd } => sd,
        InitialPrior::LogGamma { .. } => {
            return Err(CliError::Config("prior-sim needs a normal initial prior on the baseline".into()))
        }
    };
    let end = horizon.unwrap_or_else(|| cfg.extrapolation.horizon_for(cfg.data.y_plus));
    if !(end > 0.0) {
        return Err(CliError::Config(format!("prior-sim horizon must be positive, got {end}")));
    }
    let drifts: Vec<Drift> = if drifts.is_empty() { vec![base.drift.clone()] } else { drifts.to_vec() };
    let prov = provenance(cfg);
    let mut written = Vec::new();
    for (k, drift) in drifts.iter().enumerate() {
        drift.validate().map_err(|e| CliError::Config(format!("drift {k}: {e}")))?;
        let mut rng = substream(prov.seed, &format!("prior-sim/{k}"));
        let path = out.join(format!("prior_paths_{k}.csv"));
        let mut w = create(&path)?;
        let io = |e| CliError::output(&path, e);
        writeln!(w, "# config_hash={} seed={}", prov.config_hash, prov.seed).map_err(io)?;
        writeln!(w, "# drift={}", serde_json::to_string(drift).expect("drift serialises")).map_err(io)?;
        writeln!(w, "path,knot,log_hazard").map_err(io)?;
        for p in 0..paths {
            let sigma = match base.sigma {
                SigmaPrior::Fixed { value } => value,
                SigmaPrior::Exponential { rate } => Exp::new(rate).expect("validated rate").sample(&mut rng),
            };
            let gamma = match base.knots.intensity {
                Intensity::Fixed { gamma } => gamma,
                Intensity::GammaHyper { shape, rate } => Gamma::new(shape, 1.0 / rate).expect("validated").sample(&mut rng),
            };
            let scheme = InnovationScheme::new(base.scheme, sigma, sigma0)?;
            let model = simulate_prior_hazard(drift, &scheme, gamma, end, &mut rng)?;
            for (s, a) in model.knots().iter().zip(model.log_hazards()) {
                writeln!(w, "{p},{},{}", fmt(*s), fmt(*a)).map_err(io)?;
            }
        }
        finish(w, &path)?;
        written.push(path);
    }
    Ok(format!("wrote {} path files of {paths} paths on (0, {end})", written.len()))
}

fn fmt(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooRow {
    pub gamma: f64,
    pub elpd_loo: f64,
    pub se: f64,
    pub max_k: f64,
    pub n_high_k: usize,
}

/// Refits the model at each fixed `gamma` and scores it by PSIS-LOO.
pub fn loo_sweep(cfg: &RunConfig, data: &Dataset, gammas: &[f64]) -> CliResult<Vec<LooRow>> {
    let mut rows = Vec::new();
    for &g in gammas {
        let mut c = cfg.clone();
        c.baseline.intensity = Intensity::Fixed { gamma: g };
        c.validate()?;
        let draws = sample(data, &c.prior(), &c.sampler, &format!("loo/{}", fmt(g)))?;
        let ll = dpem_core::posterior::pointwise_log_likelihood(&draws.models()?, data)?;
        let r = dpem_core::posterior::psis_loo(&ll)?;
        rows.push(LooRow {
            gamma: g,
            elpd_loo: r.elpd_loo,
            se: r.se,
            max_k: r.max_k,
            n_high_k: r.n_high_k,
        });
    }
    Ok(rows)
}

pub fn best_gamma(rows: &[LooRow]) -> Option<f64> {
    rows.iter().max_by(|a, b| a.elpd_loo.total_cmp(&b.elpd_loo)).map(|r| r.gamma)
}

pub fn loo(cfg: &RunConfig, gammas: &[f64], out: &Path) -> CliResult<String> {
    if gammas.is_empty() {
        return Err(CliError::Config("loo needs at least one gamma".into()));
    }
    let data = load_data(cfg)?;
    let prov = provenance(cfg);
    let rows = loo_sweep(cfg, &data, gammas)?;
    let path = out.join("loo.csv");
    let mut w = create(&path)?;
    let io = |e| CliError::output(&path, e);
    writeln!(w, "# config_hash={} seed={}", prov.config_hash, prov.seed).map_err(io)?;
    writeln!(w, "gamma,elpd_loo,se,max_k,n_high_k").map_err(io)?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{}", fmt(r.gamma), fmt(r.elpd_loo), fmt(r.se), fmt(r.max_k), r.n_high_k).map_err(io)?;
    }
    finish(w, &path)?;
    let mut lines: Vec<String> = rows
        .iter()
        .map(|r| format!("gamma {:>5}: elpd {:>9.2} (se {:.2}) max k {:.2}", r.gamma, r.elpd_loo, r.se, r.max_k))
        .collect();
    lines.push(format!("best gamma: {}", best_gamma(&rows).expect("non-empty")));
    Ok(lines.join("\n"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub x: f64,
    pub pdmp_mean: f64,
    pub pdmp_se: f64,
    pub rj_mean: f64,
    pub rj_se: f64,
    /// Difference in units of the combined standard error.
    pub z: f64,
}

fn hazard_means(draws: &PosteriorDraws, grid: &[f64]) -> CliResult<Vec<(f64, f64)>> {
    let models = draws.models()?;
    let mut out = Vec::with_capacity(grid.len());
    for &x in grid {
        let mut k = 0;
        let mut err = None;
        let chains = by_chain(draws, |_| {
            k += 1;
            models[k - 1].hazard(x, &[]).unwrap_or_else(|e| {
                err = Some(e);
                f64::NAN
            })
        });
        if let Some(e) = err {
            return Err(e.into());
        }
        let all: Vec<f64> = chains.iter().flatten().copied().collect();
        out.push((dpem_core::stats::mean(&all), mcse(&chains)?));
    }
    Ok(out)
}

/// Posterior mean hazards of the two samplers on a grid inside `(0, y+)`.
pub fn compare_samplers(cfg: &RunConfig, data: &Dataset, points: usize) -> CliResult<Vec<ComparisonRow>> {
    if !cfg.covariates.is_empty() {
        return Err(CliError::Config("compare-rj needs a baseline-only model".into()));
    }
    let prior = cfg.prior();
    let mut pdmp = cfg.sampler.clone();
    pdmp.method = Method::Pdmp;
    let mut rj = cfg.sampler.clone();
    rj.method = Method::Rj;
    let a = sample(data, &prior, &pdmp, "compare/pdmp")?;
    let b = sample(data, &prior, &rj, "compare/rj")?;
    let y = cfg.data.y_plus;
    let g: Vec<f64> = (0..points).map(|i| y * (i as f64 + 0.5) / points as f64).collect();
    let ha = hazard_means(&a, &g)?;
    let hb = hazard_means(&b, &g)?;
    Ok(g
        .iter()
        .zip(ha.iter().zip(&hb))
        .map(|(&x, (&(pm, ps), &(rm, rs)))| ComparisonRow {
            x,
            pdmp_mean: pm,
            pdmp_se: ps,
            rj_mean: rm,
            rj_se: rs,
            z: (pm - rm) / (ps * ps + rs * rs).sqrt(),
        })
        .collect())
}

pub fn compare_rj(cfg: &RunConfig, points: usize, out: &Path) -> CliResult<String> {
    let data = load_data(cfg)?;
    let prov = provenance(cfg);
    let rows = compare_samplers(cfg, &data, points)?;
    let path = out.join("compare_rj.csv");
    let mut w = create(&path)?;
    let io = |e| CliError::output(&path, e);
    writeln!(w, "# config_hash={} seed={}", prov.config_hash, prov.seed).map_err(io)?;
    writeln!(w, "x,pdmp_mean,pdmp_se,rj_mean,rj_se,z").map_err(io)?;
    for r in &rows {
        writeln!(w, "{},{},{},{},{},{}", fmt(r.x), fmt(r.pdmp_mean), fmt(r.pdmp_se), fmt(r.rj_mean), fmt(r.rj_se), fmt(r.z))
            .map_err(io)?;
    }
    finish(w, &path)?;
    let worst = rows.iter().map(|r| r.z.abs()).fold(0.0, f64::max);
    Ok(format!("{} grid points, largest |z| = {worst:.2}", rows.len()))
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::HazardModel;
use crate::stats::{mean, quantile_sorted, variance};

/// Median with a central 95% interval, plus the mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
    pub mean: f64,
    pub sd: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

pub fn summarise(values: &[f64]) -> Result<Interval> {
    if values.is_empty() {
        return Err(Error::invalid("cannot summarise an empty set of draws"));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Ok(Interval {
        median: quantile_sorted(&v, 0.5),
        lower: quantile_sorted(&v, 0.025),
        upper: quantile_sorted(&v, 0.975),
        mean: mean(&v),
        sd: if v.len() > 1 { variance(&v).sqrt() } else { 0.0 },
    })
}

fn per_draw_mean_survival(models: &[HazardModel], w: &[f64], cut: f64) -> Result<Vec<f64>> {
    if models.is_empty() {
        return Err(Error::invalid("no draws"));
    }
    for m in models {
        if cut.is_finite() && cut > m.horizon() * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "cut {cut} lies beyond the model horizon {}",
                m.horizon()
            )));
        }
    }
    models.iter().map(|m| m.mean_survival(w, cut)).collect()
}

/// Restricted mean survival on `(0, cut)` per draw, summarised.
/// An infinite `cut` lets the last hazard value persist.
pub fn mean_survival(models: &[HazardModel], w: &[f64], cut: f64) -> Result<(Interval, Vec<f64>)> {
    let values = per_draw_mean_survival(models, w, cut)?;
    Ok((summarise(&values)?, values))
}

/// Paired difference `E[Y_t] - E[Y_c]`, pairing draws by position.
pub fn mean_survival_difference(
    treatment: (&[HazardModel], &[f64]),
    control: (&[HazardModel], &[f64]),
    cut: f64,
) -> Result<(Interval, Vec<f64>)> {
    let (mt, wt) = treatment;
    let (mc, wc) = control;
    if mt.len() != mc.len() {
        return Err(Error::invalid(format!("{} treatment draws vs {} control draws", mt.len(), mc.len())));
    }
    for (a, b) in mt.iter().zip(mc) {
        if a.horizon() != b.horizon() {
            return Err(Error::invalid("treatment and control draws have different horizons"));
        }
    }
    let t = per_draw_mean_survival(mt, wt, cut)?;
    let c = per_draw_mean_survival(mc, wc, cut)?;
    let d: Vec<f64> = t.iter().zip(&c).map(|(a, b)| a - b).collect();
    Ok((summarise(&d)?, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    Hazard,
    Survival,
    LogHazard,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub x: f64,
    pub median: f64,
    pub lower: f64,
    pub upper: f64,
}

fn curve_value(m: &HazardModel, y: f64, w: &[f64], kind: CurveKind) -> Result<f64> {
    // the hazard at 0 is its right limit
    let yh = if y > 0.0 { y } else { f64::MIN_POSITIVE };
    match kind {
        CurveKind::Survival => m.survival(y, w),
        CurveKind::Hazard => m.hazard(yh, w),
        CurveKind::LogHazard => m.log_hazard(yh, w),
    }
}

/// Pointwise median and central 95% band across draws.
pub fn curve_quantiles(models: &[HazardModel], grid: &[f64], w: &[f64], kind: CurveKind) -> Result<Vec<CurveRow>> {
    if models.is_empty() {
        return Err(Error::invalid("no draws"));
    }
    if grid.windows(2).any(|g| !(g[0] < g[1])) || grid.first().is_some_and(|&g| g < 0.0) {
        return Err(Error::invalid("grid must be increasing and non-negative"));
    }
    let horizon = models.iter().map(HazardModel::horizon).fold(f64::INFINITY, f64::min);
    if grid.last().is_some_and(|&g| g > horizon * (1.0 + 1e-12)) {
        return Err(Error::invalid(format!("grid extends beyond the horizon {horizon}")));
    }
    grid.iter()
        .map(|&y| {
            let mut vals = models
                .iter()
                .map(|m| curve_value(m, y, w, kind))
                .collect::<Result<Vec<_>>>()?;
            vals.sort_by(f64::total_cmp);
            Ok(CurveRow {
                x: y,
                median: quantile_sorted(&vals, 0.5),
                lower: quantile_sorted(&vals, 0.025),
                upper: quantile_sorted(&vals, 0.975),
            })
        })
        .collect()
}

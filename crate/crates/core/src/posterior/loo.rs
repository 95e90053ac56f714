//! Pareto-smoothed importance sampling leave-one-out cross-validation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smoothed log-weights of one observation with the fitted Pareto shape.
#[derive(Debug, Clone, PartialEq)]
pub struct PsisResult {
    pub log_weights: Vec<f64>,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LooResult {
    pub elpd_loo: f64,
    pub se: f64,
    pub pointwise: Vec<f64>,
    pub pareto_k: Vec<f64>,
    /// Observations with `k > 0.7`.
    pub n_high_k: usize,
    pub max_k: f64,
}

const MIN_DRAWS: usize = 100;

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Generalized Pareto fit of exceedances (sorted ascending) by the
/// Zhang–Stephens profile method with a weakly informative prior on `k`.
fn gpd_fit(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let prior_bs = 3.0;
    let prior_k = 10.0;
    let m_est = 30 + (n as f64).sqrt() as usize;
    let x_star = x[((n as f64) / 4.0 + 0.5).floor() as usize - 1];
    let x_max = x[n - 1];
    let b: Vec<f64> = (1..=m_est)
        .map(|j| {
            let jj = j as f64 - 0.5;
            1.0 / x_max + (1.0 - (m_est as f64 / jj).sqrt()) / (prior_bs * x_star)
        })
        .collect();
    let k_of = |bi: f64| -> f64 { x.iter().map(|&xi| (-bi * xi).ln_1p()).sum::<f64>() / n as f64 };
    let len_scale: Vec<f64> = b
        .iter()
        .map(|&bi| {
            let k = k_of(bi);
            n as f64 * ((-bi / k).ln() - k - 1.0)
        })
        .collect();
    let weights: Vec<f64> = len_scale
        .iter()
        .map(|&l| 1.0 / len_scale.iter().map(|&m| (m - l).exp()).sum::<f64>())
        .collect();
    let keep: Vec<usize> = (0..m_est).filter(|&i| weights[i] >= 10.0 * f64::EPSILON).collect();
    let wsum: f64 = keep.iter().map(|&i| weights[i]).sum();
    let b_post: f64 = keep.iter().map(|&i| b[i] * weights[i]).sum::<f64>() / wsum;
    let mut k_post = x.iter().map(|&xi| (-b_post * xi).ln_1p()).sum::<f64>() / n as f64;
    let sigma = -k_post / b_post;
    k_post = (n as f64 * k_post + prior_k * 0.5) / (n as f64 + prior_k);
    (k_post, sigma)
}

fn gpd_inv(p: f64, k: f64, sigma: f64) -> f64 {
    if k.abs() < 1e-12 {
        -sigma * (-p).ln_1p()
    } else {
        sigma * (-k * (-p).ln_1p()).exp_m1() / k
    }
}

/// Pareto-smooths one vector of raw log importance ratios.
pub fn psis_smooth(log_ratios: &[f64]) -> PsisResult {
    let s = log_ratios.len();
    let cutoff_ind = (((0.2 * s as f64).min(3.0 * (s as f64).sqrt())).ceil() as usize).max(1);
    let mut lw: Vec<f64> = log_ratios.to_vec();
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    lw.iter_mut().for_each(|x| *x -= max);

    let mut order: Vec<usize> = (0..s).collect();
    order.sort_by(|&a, &b| lw[a].total_cmp(&lw[b]));
    let cutoff_min = (f64::MIN_POSITIVE).ln();
    let x_cutoff = lw[order[s - cutoff_ind - 1]].max(cutoff_min);
    let tail: Vec<usize> = order.iter().copied().filter(|&i| lw[i] > x_cutoff).collect();

    let mut k = f64::INFINITY;
    if tail.len() > 4 {
        let exp_cutoff = x_cutoff.exp();
        let x: Vec<f64> = tail.iter().map(|&i| lw[i].exp() - exp_cutoff).collect();
        let (kk, sigma) = gpd_fit(&x);
        k = kk;
        if k.is_finite() {
            let m = tail.len();
            for (r, &i) in tail.iter().enumerate() {
                let p = (r as f64 + 0.5) / m as f64;
                lw[i] = (gpd_inv(p, k, sigma) + exp_cutoff).ln();
            }
            lw.iter_mut().for_each(|x| *x = x.min(0.0));
        }
    }
    let norm = log_sum_exp(&lw);
    lw.iter_mut().for_each(|x| *x -= norm);
    PsisResult { log_weights: lw, k }
}

/// PSIS-LOO from `log_lik[s][i]` (draws by observations).
pub fn psis_loo(log_lik: &[Vec<f64>]) -> Result<LooResult> {
    let s = log_lik.len();
    if s < MIN_DRAWS {
        return Err(Error::TooFewDraws { needed: MIN_DRAWS, got: s });
    }
    let n = log_lik[0].len();
    if log_lik.iter().any(|row| row.len() != n) {
        return Err(Error::invalid("ragged log-likelihood matrix"));
    }
    let mut pointwise = Vec::with_capacity(n);
    let mut pareto_k = Vec::with_capacity(n);
    for i in 0..n {
        let ll: Vec<f64> = log_lik.iter().map(|row| row[i]).collect();
        let neg: Vec<f64> = ll.iter().map(|x| -x).collect();
        let smoothed = psis_smooth(&neg);
        let terms: Vec<f64> = smoothed.log_weights.iter().zip(&ll).map(|(w, l)| w + l).collect();
        pointwise.push(log_sum_exp(&terms));
        pareto_k.push(smoothed.k);
    }
    let elpd_loo: f64 = pointwise.iter().sum();
    let mean = elpd_loo / n as f64;
    let var = pointwise.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0).max(1.0);
    let se = (n as f64 * var).sqrt();
    let n_high_k = pareto_k.iter().filter(|&&k| !(k <= 0.7)).count();
    let max_k = pareto_k.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(LooResult {
        elpd_loo,
        se,
        pointwise,
        pareto_k,
        n_high_k,
        max_k,
    })
}

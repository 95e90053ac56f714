use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EssResult {
    pub ess: f64,
    /// The sequence was constant; `ess` is then the draw count.
    pub degenerate: bool,
}

/// Effective sample size by Geyer's initial positive sequence, with the
/// monotone adjustment.
pub fn ess(xs: &[f64]) -> Result<EssResult> {
    let n = xs.len();
    if n < 10 {
        return Err(Error::TooFewDraws { needed: 10, got: n });
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if !(c0 > 0.0) {
        return Ok(EssResult {
            ess: n as f64,
            degenerate: true,
        });
    }
    let rho = |lag: usize| -> f64 {
        let mut s = 0.0;
        for t in 0..n - lag {
            s += (xs[t] - mean) * (xs[t + lag] - mean);
        }
        s / n as f64 / c0
    };
    // pairs Gamma_m = rho(2m) + rho(2m+1), truncated at the first non-positive pair
    let mut sum = 0.0;
    let mut prev = f64::INFINITY;
    let mut m = 0;
    while 2 * m + 1 < n {
        let mut g = rho(2 * m) + rho(2 * m + 1);
        if g <= 0.0 {
            break;
        }
        g = g.min(prev);
        sum += g;
        prev = g;
        m += 1;
    }
    let tau = (2.0 * sum - 1.0).max(1.0 / (n as f64).log10());
    Ok(EssResult {
        ess: n as f64 / tau,
        degenerate: false,
    })
}

/// Monte Carlo standard error of the pooled mean of several chains, with
/// the effective sample sizes of the chains added together.
pub fn mcse(chains: &[Vec<f64>]) -> Result<f64> {
    let all: Vec<f64> = chains.iter().flatten().copied().collect();
    if all.is_empty() {
        return Err(Error::TooFewDraws { needed: 10, got: 0 });
    }
    let n = all.len() as f64;
    let mean = all.iter().sum::<f64>() / n;
    let var = all.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let mut total = 0.0;
    for c in chains {
        total += ess(c)?.ess;
    }
    Ok((var / total).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normals(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn iid_sequence() {
        let e = ess(&normals(10_000, 1)).unwrap();
        assert!((e.ess / 10_000.0 - 1.0).abs() < 0.15, "{}", e.ess);
    }

    #[test]
    fn ar1_sequence() {
        let rho: f64 = 0.9;
        let z = normals(100_000, 2);
        let mut x = vec![0.0; z.len()];
        for t in 1..z.len() {
            x[t] = rho * x[t - 1] + (1.0 - rho * rho).sqrt() * z[t];
        }
        let want = x.len() as f64 * (1.0 - rho) / (1.0 + rho);
        let e = ess(&x).unwrap();
        assert!((e.ess / want - 1.0).abs() < 0.25, "{} vs {want}", e.ess);
    }

    #[test]
    fn duplicated_sequence_halves() {
        let z = normals(10_000, 3);
        let doubled: Vec<f64> = z.iter().flat_map(|&v| [v, v]).collect();
        let e = ess(&doubled).unwrap();
        assert!((e.ess / 10_000.0 - 1.0).abs() < 0.15, "{}", e.ess);
    }

    #[test]
    fn constant_and_short_sequences() {
        let e = ess(&[2.0; 50]).unwrap();
        assert!(e.degenerate);
        assert_eq!(e.ess, 50.0);
        assert!(ess(&[1.0; 5]).is_err());
    }

    #[test]
    fn mcse_of_iid_chains_is_sd_over_root_n() {
        let chains = vec![normals(4000, 3), normals(4000, 4)];
        let se = mcse(&chains).unwrap();
        assert!((se * 8000f64.sqrt() - 1.0).abs() < 0.1, "{se}");
    }
}

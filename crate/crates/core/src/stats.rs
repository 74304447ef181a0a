//! Summaries with explicit censoring, binomial intervals and power-law fits.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Censor rate above which quantiles are flagged unreliable.
pub const MAX_CENSOR_RATE: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    /// Number of samples, censored included.
    pub n: usize,
    pub censored: usize,
    pub censor_rate: f64,
    /// Over uncensored samples.
    pub mean: Option<f64>,
    pub stderr: Option<f64>,
    pub quantiles: Option<Quantiles>,
    /// Set when the censor rate reaches [`MAX_CENSOR_RATE`].
    pub unreliable: bool,
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `None` entries are censored samples.
pub fn summarize(samples: &[Option<f64>]) -> Result<Summary> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("summarize needs at least one sample"));
    }
    let mut vals: Vec<f64> = samples.iter().flatten().copied().collect();
    let n = samples.len();
    let censored = n - vals.len();
    let censor_rate = censored as f64 / n as f64;
    let unreliable = censor_rate >= MAX_CENSOR_RATE;
    let (mean, stderr) = if vals.is_empty() {
        (None, None)
    } else {
        let m = vals.iter().sum::<f64>() / vals.len() as f64;
        let se = if vals.len() > 1 {
            let var = vals.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
            (var / vals.len() as f64).sqrt()
        } else {
            0.0
        };
        (Some(m), Some(se))
    };
    let quantiles = if vals.is_empty() || unreliable {
        None
    } else {
        vals.sort_by(f64::total_cmp);
        Some(Quantiles {
            q25: quantile_sorted(&vals, 0.25),
            median: quantile_sorted(&vals, 0.5),
            q75: quantile_sorted(&vals, 0.75),
        })
    };
    Ok(Summary { n, censored, censor_rate, mean, stderr, quantiles, unreliable })
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = k as f64 / nf;
    let z2 = z * z;
    let center = (p + z2 / (2.0 * nf)) / (1.0 + z2 / nf);
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / (1.0 + z2 / nf);
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Standard error of a proportion estimate.
pub fn proportion_stderr(k: u64, n: u64) -> f64 {
    let p = k as f64 / n as f64;
    (p * (1.0 - p) / n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y = intercept + slope * x`.
pub fn linear_fit(points: &[(f64, f64)]) -> Result<Fit> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(format!("need at least 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= f64::EPSILON * mx.abs().max(1.0) {
        return Err(Error::DegenerateFit("all abscissae are equal".into()));
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy / (sxx * syy)).min(1.0) };
    Ok(Fit { slope, intercept: my - slope * mx, r_squared })
}

fn check_positive(points: &[(f64, f64)]) -> Result<()> {
    if points.iter().any(|p| !(p.0 > 0.0 && p.1 > 0.0)) {
        return Err(Error::DegenerateFit("log fits need positive abscissae and values".into()));
    }
    Ok(())
}

/// Fit `log value = intercept + slope * log L`.
pub fn loglog_fit(points: &[(f64, f64)]) -> Result<Fit> {
    check_positive(points)?;
    linear_fit(&points.iter().map(|&(x, y)| (x.ln(), y.ln())).collect::<Vec<_>>())
}

/// Fit `log value = intercept + slope * L` (exponential growth in `L`).
pub fn semilog_fit(points: &[(f64, f64)]) -> Result<Fit> {
    check_positive(points)?;
    linear_fit(&points.iter().map(|&(x, y)| (x, y.ln())).collect::<Vec<_>>())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn summarize_examples() {
        let s = summarize(&[Some(3.0); 10]).unwrap();
        assert_eq!(s.stderr, Some(0.0));
        assert_eq!(s.quantiles.unwrap().median, 3.0);
        let s = summarize(&[None; 4]).unwrap();
        assert!(s.unreliable && s.mean.is_none() && s.censor_rate == 1.0);
        assert!(summarize(&[]).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let coins: Vec<Option<f64>> = (0..100_000).map(|_| Some(f64::from(u8::from(rng.random::<bool>())))).collect();
        let s = summarize(&coins).unwrap();
        assert!((s.mean.unwrap() - 0.5).abs() < 4.0 * s.stderr.unwrap());
        let s = summarize(&[Some(1.0), Some(2.0), Some(3.0), Some(4.0), None]).unwrap();
        assert!(s.unreliable && s.quantiles.is_none());
        assert_eq!(s.mean, Some(2.5));
    }

    #[test]
    fn fits() {
        let cube: Vec<(f64, f64)> = [2.0, 4.0, 8.0, 16.0].iter().map(|&l: &f64| (l, l.powi(3))).collect();
        let f = loglog_fit(&cube).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.r_squared - 1.0).abs() < 1e-12);
        let exp = |ls: &[f64]| loglog_fit(&ls.iter().map(|&l| (l, 2f64.powf(l))).collect::<Vec<_>>()).unwrap();
        let narrow = exp(&[8.0, 16.0, 32.0]);
        let wide = exp(&[16.0, 32.0, 64.0]);
        assert!(wide.slope > narrow.slope);
        assert!(narrow.r_squared < 0.99);
        assert!(loglog_fit(&[(4.0, 1.0), (4.0, 2.0), (4.0, 3.0)]).is_err());
        assert!(loglog_fit(&[(4.0, 1.0), (5.0, 2.0)]).is_err());
        let s = semilog_fit(&[(1.0, 2f64.exp()), (2.0, 4f64.exp()), (3.0, 6f64.exp())]).unwrap();
        assert!((s.slope - 2.0).abs() < 1e-12);
    }

    #[test]
    fn wilson() {
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!(lo < 0.5 && hi > 0.5 && hi - lo < 0.2);
        assert_eq!(wilson_interval(0, 100, 2.0).0, 0.0);
        assert!(wilson_interval(0, 100, 2.0).1 > 0.0);
    }
}

//! Small statistical helpers: chi-square goodness of fit, jackknife
//! standard errors for variance estimates, and proportion summaries.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// P(|Z| <= 1) for a standard normal; the Berry-Esseen reference value.
pub const PHI_WINDOW_ONE_SIGMA: f64 = 0.682_689_492_137_085_9;

/// Chi-square statistic against a uniform law over the cells.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn chi_square_uniform(counts: &[u64]) -> ChiSquare {
    let cells = counts.len();
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / cells as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let dof = cells - 1;
    let p_value = if dof == 0 || total == 0 {
        1.0
    } else {
        let dist = ChiSquared::new(dof as f64).expect("dof > 0");
        1.0 - dist.cdf(statistic)
    };
    ChiSquare {
        statistic,
        dof,
        p_value,
    }
}

/// Sample mean.
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample variance (n - 1 denominator), two-pass.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

/// Jackknife standard error of the unbiased sample variance: recompute the
/// variance with each observation left out and combine the leave-one-out
/// values. Works from centered sums, O(n).
pub fn jackknife_variance_se(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 3 {
        return f64::NAN;
    }
    let m = mean(values);
    let centered: Vec<f64> = values.iter().map(|v| v - m).collect();
    let s1: f64 = centered.iter().sum(); // ~0 up to rounding
    let s2: f64 = centered.iter().map(|c| c * c).sum();
    let nf = n as f64;
    let loo: Vec<f64> = centered
        .iter()
        .map(|&c| {
            let s1p = s1 - c;
            let s2p = s2 - c * c;
            (s2p - s1p * s1p / (nf - 1.0)) / (nf - 2.0)
        })
        .collect();
    let loo_mean = mean(&loo);
    let ss: f64 = loo.iter().map(|v| (v - loo_mean) * (v - loo_mean)).sum();
    ((nf - 1.0) / nf * ss).sqrt()
}

/// Standard error of a sample mean.
pub fn mean_se(values: &[f64]) -> f64 {
    (sample_variance(values) / values.len() as f64).sqrt()
}

/// Standard error of a binomial proportion estimate.
pub fn proportion_se(p_hat: f64, n: u64) -> f64 {
    (p_hat * (1.0 - p_hat) / n as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chi_square_uniform_counts() {
        let res = chi_square_uniform(&[250, 250, 250, 250]);
        assert!(res.statistic.abs() < 1e-12);
        assert!((res.p_value - 1.0).abs() < 1e-12);
        assert_eq!(res.dof, 3);

        let res = chi_square_uniform(&[1000, 0, 0, 0]);
        assert!(res.p_value < 1e-6);
    }

    #[test]
    fn variance_and_mean() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert!((mean(&v) - 2.5).abs() < 1e-12);
        assert!((sample_variance(&v) - 5.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn jackknife_matches_direct_recomputation() {
        let v: Vec<f64> = (0..40).map(|i| ((i * 37) % 11) as f64).collect();
        let fast = jackknife_variance_se(&v);
        // Direct leave-one-out recomputation.
        let loo: Vec<f64> = (0..v.len())
            .map(|i| {
                let rest: Vec<f64> = v
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x)
                    .collect();
                sample_variance(&rest)
            })
            .collect();
        let lm = mean(&loo);
        let ss: f64 = loo.iter().map(|x| (x - lm) * (x - lm)).sum();
        let direct = ((v.len() as f64 - 1.0) / v.len() as f64 * ss).sqrt();
        assert!((fast - direct).abs() < 1e-9, "{fast} vs {direct}");
    }
}

//! Small statistical helpers: order-fixed summation, jackknife standard errors,
//! least-squares slopes.

use serde::{Deserialize, Serialize};

/// Pairwise (tree) summation. The tree shape depends only on the length, so the
/// result is independent of how the inputs were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    pairwise_sum(xs) / xs.len() as f64
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    /// Signed distance to `target` in units of standard error. A zero standard
    /// error yields 0 for an exact hit and infinity otherwise.
    pub fn z_score(&self, target: f64) -> f64 {
        let diff = self.value - target;
        if self.se > 0.0 {
            diff / self.se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY.copysign(diff)
        }
    }
}

/// Delete-one jackknife for the sample mean.
///
/// Leave-one-out means are formed in O(n); for the mean the jackknife variance
/// coincides with s²/n, but computing it through the replicates keeps the same
/// code path usable for the plug-in statistics in [`crate::verify`].
pub fn jackknife_mean(xs: &[f64]) -> Estimate {
    let n = xs.len();
    let value = mean(xs);
    if n < 2 {
        return Estimate { value, se: f64::NAN };
    }
    let total = pairwise_sum(xs);
    let nf = n as f64;
    let loo: Vec<f64> = xs.iter().map(|x| (total - x) / (nf - 1.0)).collect();
    let loo_mean = mean(&loo);
    let dev: Vec<f64> = loo.iter().map(|t| (t - loo_mean) * (t - loo_mean)).collect();
    let var = (nf - 1.0) / nf * pairwise_sum(&dev);
    Estimate { value, se: var.sqrt() }
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let mx = mean(xs);
    let my = mean(ys);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jackknife_matches_textbook_se() {
        let xs: Vec<f64> = (0..101).map(|i| ((i * 37) % 11) as f64 * 0.3 - 1.0).collect();
        let n = xs.len() as f64;
        let m = mean(&xs);
        let s2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
        let est = jackknife_mean(&xs);
        assert!((est.se - (s2 / n).sqrt()).abs() < 1e-12);
        assert!((est.value - m).abs() < 1e-15);
    }

    #[test]
    fn slope_of_power_law() {
        let ns = [64.0f64, 128.0, 256.0, 512.0];
        let xs: Vec<f64> = ns.iter().map(|n| n.ln()).collect();
        let ys: Vec<f64> = ns.iter().map(|n| (3.0 * n.powf(-0.5)).ln()).collect();
        assert!((ols_slope(&xs, &ys) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn z_score_edge_cases() {
        let e = Estimate { value: 1.0, se: 0.0 };
        assert_eq!(e.z_score(1.0), 0.0);
        assert!(e.z_score(0.0).is_infinite());
        let e = Estimate { value: 1.0, se: 0.5 };
        assert_eq!(e.z_score(0.0), 2.0);
    }

    #[test]
    fn pairwise_sum_matches_naive_on_small_input() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500_500.0);
    }
}

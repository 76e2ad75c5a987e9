//! Distances between equal-size sample clouds: exact `W₁` in one and in `k`
//! dimensions, and a finite-catalog lower bound on the bounded-Lipschitz metric.

pub mod assignment;
pub mod catalog;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::pairwise_sum;

pub use assignment::min_cost_assignment;
pub use catalog::{lipschitz_product_check, ProductLipReport, TestCatalog, TestFunction, TestKind};

/// Largest cloud accepted by [`w1_exact_kd`].
pub const EXACT_KD_LIMIT: usize = 2048;

/// Exact `W₁` between two empirical measures on `R` with `n` atoms each:
/// `(1/n) Σ |a₍ᵢ₎ − b₍ᵢ₎|` over order statistics.
pub fn w1_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Ok(0.0);
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let gaps: Vec<f64> = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
    Ok(pairwise_sum(&gaps) / a.len() as f64)
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
}

/// Exact `W₁` with Euclidean cost between two clouds of `n ≤ 2048` points via
/// minimum-cost perfect matching.
pub fn w1_exact_kd(a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<f64> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::LengthMismatch(n, b.len()));
    }
    if n > EXACT_KD_LIMIT {
        return Err(Error::SizeLimit { n, limit: EXACT_KD_LIMIT });
    }
    if n == 0 {
        return Ok(0.0);
    }
    let k = a[0].len();
    if let Some(bad) = a.iter().chain(b).find(|x| x.len() != k) {
        return Err(Error::LengthMismatch(bad.len(), k));
    }
    let mut cost = Vec::with_capacity(n * n);
    for x in a {
        for y in b {
            cost.push(euclid(x, y));
        }
    }
    let assign = min_cost_assignment(&cost, n);
    let matched: Vec<f64> = assign.iter().enumerate().map(|(i, &j)| cost[i * n + j]).collect();
    Ok(pairwise_sum(&matched) / n as f64)
}

/// Restricts every point to the listed coordinates.
pub fn marginal(cloud: &[Vec<f64>], coords: &[usize]) -> Vec<Vec<f64>> {
    cloud.iter().map(|x| coords.iter().map(|&c| x[c]).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlSup {
    pub value: f64,
    pub id: String,
}

/// `max_g |mean_a g − mean_b g|` over the catalog; a lower bound on the BL
/// distance between the two empirical measures.
pub fn bl_sup(a: &[Vec<f64>], b: &[Vec<f64>], catalog: &TestCatalog) -> Result<BlSup> {
    let mut best = BlSup { value: 0.0, id: String::new() };
    for g in &catalog.members {
        let diff = (cloud_mean(a, g) - cloud_mean(b, g)).abs();
        if best.id.is_empty() || diff > best.value {
            best = BlSup { value: diff, id: g.id.clone() };
        }
    }
    if best.id.is_empty() {
        return Err(Error::Precondition("empty catalog".into()));
    }
    Ok(best)
}

fn cloud_mean(cloud: &[Vec<f64>], g: &TestFunction) -> f64 {
    let vals: Vec<f64> = cloud.iter().map(|x| g.eval(x)).collect();
    pairwise_sum(&vals) / cloud.len().max(1) as f64
}

/// Serialized form of a distance computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub estimator: String,
    pub n: usize,
    pub k: usize,
    pub value: f64,
    pub seed: u64,
}

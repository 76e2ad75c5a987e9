//! Disorder-averaged SK diagnostics: overlap concentration around the
//! replica-symmetric `q`, and the law of a cavity field `θᵀx`.
//!
//! For each disorder sample, independent Glauber chains provide replicas. The
//! cavity-field cloud `{θᵀx}` for one `θ ~ N(0, I/N)` is compared in `W₁` with
//! `√q z + √(1−q) ξ`, where `z = θᵀ⟨x⟩ / √(‖⟨x⟩‖²/N)` uses the estimated
//! magnetization vector (the same `θ`, so the comparison is conditional).

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::metrics::w1_1d;
use crate::projection::sample_directions;
use crate::seed::{derive_seed, rng_at};
use crate::sources::sk::{sk_fixed_point, sk_glauber, SkModel};
use crate::sources::VectorSource;
use crate::stats::{jackknife_mean, mean, pairwise_sum};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CavityConfig {
    pub beta: f64,
    pub h: f64,
    pub disorders: usize,
    pub chains: usize,
    pub draws_per_chain: usize,
    pub burnin: usize,
    pub thin: usize,
    pub mean_samples: usize,
}

impl Default for CavityConfig {
    fn default() -> Self {
        Self {
            beta: 0.3,
            h: 0.3,
            disorders: 32,
            chains: 16,
            draws_per_chain: 64,
            burnin: crate::sources::sk::DEFAULT_BURNIN,
            thin: crate::sources::sk::DEFAULT_THIN,
            mean_samples: crate::sources::sk::DEFAULT_MEAN_SAMPLES,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisorderResult {
    pub disorder_seed: u64,
    /// `max |‖x‖²/N − 1|` over all draws.
    pub max_norm_deviation: f64,
    /// `⟨(x¹·x²/N − q)²⟩` over cross-chain pairs.
    pub c2_hat: f64,
    /// `‖⟨x⟩‖²/N` from the estimated magnetizations.
    pub q_n: f64,
    /// `W₁` between the cavity-field cloud and the Gaussian reference cloud.
    pub w1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CavityReport {
    pub n: usize,
    pub q: f64,
    pub c1_hat: f64,
    pub n_c2: f64,
    pub n_c2_se: f64,
    pub w1: f64,
    pub w1_se: f64,
    pub disorders: Vec<DisorderResult>,
}

/// One `N` of the SK pipeline; disorder `d` uses seeds derived from `(seed, d)`.
pub fn sk_cavity(n: usize, cfg: &CavityConfig, seed: u64) -> Result<CavityReport> {
    precondition(cfg.disorders >= 2 && cfg.chains >= 2 && cfg.draws_per_chain >= 1, || {
        "need at least 2 disorders, 2 chains and 1 draw per chain".into()
    })?;
    let q = sk_fixed_point(cfg.beta, cfg.h)?;
    let results: Vec<DisorderResult> = (0..cfg.disorders)
        .into_par_iter()
        .map(|d| disorder_run(n, q, cfg, seed, d as u64))
        .collect::<Result<_>>()?;

    let c2: Vec<f64> = results.iter().map(|r| n as f64 * r.c2_hat).collect();
    let w1: Vec<f64> = results.iter().map(|r| r.w1).collect();
    let c2 = jackknife_mean(&c2);
    let w1 = jackknife_mean(&w1);
    let c1_hat = results.iter().map(|r| r.max_norm_deviation).fold(0.0, f64::max);
    Ok(CavityReport { n, q, c1_hat, n_c2: c2.value, n_c2_se: c2.se, w1: w1.value, w1_se: w1.se, disorders: results })
}

fn disorder_run(n: usize, q: f64, cfg: &CavityConfig, seed: u64, d: u64) -> Result<DisorderResult> {
    let disorder_seed = derive_seed(seed, &[("sk-n", n as u64), ("disorder", d)]);
    let model = Arc::new(SkModel::from_seed(n, cfg.beta, cfg.h, disorder_seed)?);
    let source = sk_glauber(model, cfg.burnin, cfg.thin)?;
    let mut rng = rng_at(seed, &[("sk-n", n as u64), ("gibbs", d)]);

    let chains: Vec<Vec<Vec<f64>>> =
        (0..cfg.chains).map(|_| source.sample_batch(cfg.draws_per_chain, &mut rng)).collect();
    let magnetization = source.estimate_mean(cfg.mean_samples, &mut rng).values;

    let nf = n as f64;
    let max_norm_deviation = chains
        .iter()
        .flatten()
        .map(|x| (x.iter().map(|v| v * v).sum::<f64>() / nf - 1.0).abs())
        .fold(0.0, f64::max);

    let mut sq = Vec::new();
    for a in 0..cfg.chains {
        for b in a + 1..cfg.chains {
            for t in 0..cfg.draws_per_chain {
                let r = chains[a][t].iter().zip(&chains[b][t]).map(|(u, v)| u * v).sum::<f64>() / nf;
                sq.push((r - q).powi(2));
            }
        }
    }
    let c2_hat = mean(&sq);

    let theta = sample_directions(n, 1, &mut rng)?;
    let fields: Vec<f64> = chains.iter().flatten().map(|x| theta.project(x).map(|v| v[0])).collect::<Result<_>>()?;
    let q_n = pairwise_sum(&magnetization.iter().map(|m| m * m).collect::<Vec<_>>()) / nf;
    let z = if q_n > 0.0 { theta.project(&magnetization)?[0] / q_n.sqrt() } else { 0.0 };
    let mut ref_rng = rng_at(seed, &[("sk-n", n as u64), ("reference", d)]);
    let noise = (1.0 - q).sqrt();
    let reference: Vec<f64> =
        (0..fields.len()).map(|_| q.sqrt() * z + noise * ref_rng.sample::<f64, _>(StandardNormal)).collect();
    let w1 = w1_1d(&fields, &reference)?;
    Ok(DisorderResult { disorder_seed, max_norm_deviation, c2_hat, q_n, w1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_is_consistent() {
        let cfg = CavityConfig { disorders: 3, chains: 3, draws_per_chain: 4, burnin: 20, thin: 2, mean_samples: 200, ..Default::default() };
        let r = sk_cavity(24, &cfg, 7).unwrap();
        assert_eq!(r.c1_hat, 0.0);
        assert_eq!(r.disorders.len(), 3);
        assert!(r.n_c2 > 0.0 && r.w1 > 0.0);
        assert_eq!(r, sk_cavity(24, &cfg, 7).unwrap());
    }
}

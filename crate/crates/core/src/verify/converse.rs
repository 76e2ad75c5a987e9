//! Functionals that detect concentration from the projected law.
//!
//! If Gaussian projections hold with parameters `(ρ, q)`, then
//! `E e^{−λ‖x‖²/N} → e^{−λρ}` for every `λ ≥ 0`, and
//! `2 E[e^{−‖x¹‖²/N − ‖x²‖²/N} (cosh(2x¹·x²/N − 2q) − 1)] → 0`.
//! The second is nonnegative and vanishes only when the overlap concentrates.

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::concentration::pair_statistics;
use crate::error::{precondition, Result};
use crate::seed::{fork_seed, rng_at};
use crate::sources::VectorSource;
use crate::stats::{jackknife_mean, Estimate};

const BLOCK: usize = 2048;

/// Runs `per_item` on `count` items in seeded blocks and returns the values in
/// item order.
fn blocked<F>(count: usize, seed: u64, per_item: F) -> Vec<f64>
where
    F: Fn(&mut dyn RngCore) -> f64 + Sync,
{
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_at(seed, &[("block", b as u64)]);
            let len = BLOCK.min(count - b * BLOCK);
            (0..len).map(|_| per_item(&mut rng)).collect::<Vec<f64>>()
        })
        .collect::<Vec<_>>()
        .concat()
}

/// `2 E[e^{−a₁−a₂}(cosh(2R − 2q) − 1)]` with `aℓ = ‖xℓ‖²/N`, `R = x¹·x²/N`.
pub fn converse_cosh(source: &dyn VectorSource, q_target: f64, n_pairs: usize, rng: &mut dyn RngCore) -> Result<Estimate> {
    precondition(n_pairs >= 2, || format!("need at least 2 pairs, got {n_pairs}"))?;
    let vals = blocked(n_pairs, fork_seed(rng), |rng| {
        let x1 = source.sample(rng);
        let x2 = source.sample(rng);
        let (a1, a2, r) = pair_statistics(&x1, &x2);
        2.0 * (-a1 - a2).exp() * ((2.0 * r - 2.0 * q_target).cosh() - 1.0)
    });
    Ok(jackknife_mean(&vals))
}

/// Asymptotic lower bound of [`converse_cosh`] when the declared `q` is off
/// by `δ = 1/2` from the true overlap and `‖x‖²/N → ρ`:
/// `e^{−2ρ}(cosh 1 − 1)/2`. The actual limit, `2e^{−2ρ}(cosh 1 − 1)`, is four
/// times larger.
pub fn wrong_q_lower_bound(rho: f64) -> f64 {
    (-2.0 * rho).exp() * (1f64.cosh() - 1.0) / 2.0
}

/// `E e^{−λ‖x‖²/N}` for `x ~ N(0, I_N)`: `(1 + 2λ/N)^{−N/2}`.
pub fn isotropic_laplace_reference(n: usize, lambda: f64) -> f64 {
    let nf = n as f64;
    (1.0 + 2.0 * lambda / nf).powf(-nf / 2.0)
}

/// Exact [`converse_cosh`] value for `x ~ N(0, I_N)` with `q = 0`.
///
/// Writing `xℓ = ‖xℓ‖uℓ` with independent uniform directions and expanding
/// `cosh(2R) − 1` in powers of `R = a₁^{1/2} a₂^{1/2} u₁·u₂`,
/// the value is `2 Σ_{m≥1} 4^m/(2m)! · E(u₁·u₂)^{2m} · (E aᵐe^{−a})²`, where
/// `E(u₁·u₂)^{2m} = (2m−1)!!/(N(N+2)…(N+2m−2))` and, for `a = χ²_N/N`,
/// `E aᵐe^{−a} = N(N+2)…(N+2m−2)/Nᵐ · (1 + 2/N)^{−N/2−m}`.
pub fn isotropic_cosh_reference(n: usize) -> f64 {
    let nf = n as f64;
    let c = 1.0 + 2.0 / nf;
    let mut total = 0.0;
    let mut rising = 1.0; // N(N+2)…(N+2m−2)
    let mut double_fact = 1.0; // (2m−1)!!
    let mut factorial = 1.0; // (2m)!
    for m in 1..=40 {
        let mf = m as f64;
        rising *= nf + 2.0 * (mf - 1.0);
        double_fact *= 2.0 * mf - 1.0;
        factorial *= (2.0 * mf - 1.0) * (2.0 * mf);
        let dir_moment = double_fact / rising;
        let radial = rising / nf.powi(m) * c.powf(-nf / 2.0 - mf);
        let term = 4f64.powi(m) / factorial * dir_moment * radial * radial;
        total += term;
        if term < 1e-18 * total {
            break;
        }
    }
    2.0 * total
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplacePoint {
    pub lambda: f64,
    pub lhs: f64,
    pub lhs_se: f64,
    /// `e^{−λρ}`.
    pub rhs: f64,
    pub gap: f64,
}

/// Monte Carlo `E e^{−λ‖x‖²/N}` against `e^{−λρ}` at each `λ`, using the same
/// draws for every `λ`.
pub fn converse_laplace(
    source: &dyn VectorSource,
    rho_target: f64,
    lambdas: &[f64],
    n_samples: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<LaplacePoint>> {
    precondition(lambdas.iter().all(|l| *l >= 0.0), || "lambda values must be >= 0".into())?;
    precondition(n_samples >= 2, || format!("need at least 2 samples, got {n_samples}"))?;
    let norms = blocked(n_samples, fork_seed(rng), |rng| {
        let x = source.sample(rng);
        x.iter().map(|v| v * v).sum::<f64>() / x.len() as f64
    });
    Ok(lambdas
        .iter()
        .map(|&lambda| {
            let vals: Vec<f64> = norms.iter().map(|a| (-lambda * a).exp()).collect();
            let est = jackknife_mean(&vals);
            let rhs = (-lambda * rho_target).exp();
            LaplacePoint { lambda, lhs: est.value, lhs_se: est.se, rhs, gap: est.value - rhs }
        })
        .collect())
}

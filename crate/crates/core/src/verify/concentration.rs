//! Thin-shell and overlap diagnostics, and the rate functions `d₁`, `d₂`.

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};
use crate::sources::VectorSource;
use crate::stats::{jackknife_mean, mean};

/// `d₁(c₁)` and `d₂(c₂)` for a given `N`, `ρ`, `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub d1: f64,
    pub d2: f64,
}

/// `d(y) = √(3N²y + 4Nc√y + 2Nc²)` with `c = ρ` for `d₁` and `c = q` for `d₂`.
pub fn rates(c1: f64, c2: f64, n: usize, rho: f64, q: f64) -> Result<Rates> {
    precondition(c1 >= 0.0 && c2 >= 0.0, || format!("concentration constants must be >= 0, got c1={c1}, c2={c2}"))?;
    let nf = n as f64;
    let d = |y: f64, c: f64| (3.0 * nf * nf * y + 4.0 * nf * c * y.sqrt() + 2.0 * nf * c * c).sqrt();
    Ok(Rates { d1: d(c1, rho), d2: d(c2, q) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub n: usize,
    /// Mean of `‖x‖²/N`.
    pub rho_hat: f64,
    /// Mean of `x¹·x²/N`.
    pub q_hat: f64,
    /// Target used for `c1_hat` (declared, or `rho_hat` when absent).
    pub rho: f64,
    pub q: f64,
    /// `⟨(‖x‖²/N − ρ)²⟩`.
    pub c1_hat: f64,
    pub c1_se: f64,
    /// `⟨(x¹·x²/N − q)²⟩`.
    pub c2_hat: f64,
    pub c2_se: f64,
    pub d1: f64,
    pub d2: f64,
    pub n_pairs: usize,
}

/// Per-pair statistics `(‖x¹‖²/N, ‖x²‖²/N, x¹·x²/N)`.
pub fn pair_statistics(x1: &[f64], x2: &[f64]) -> (f64, f64, f64) {
    let n = x1.len() as f64;
    let (mut a1, mut a2, mut r) = (0.0, 0.0, 0.0);
    for (u, v) in x1.iter().zip(x2) {
        a1 += u * u;
        a2 += v * v;
        r += u * v;
    }
    (a1 / n, a2 / n, r / n)
}

/// Monte Carlo estimates of the two concentration constants from `n_pairs`
/// independent replica pairs. Absent targets default to the empirical means.
pub fn concentration_report(
    source: &dyn VectorSource,
    n_pairs: usize,
    rng: &mut dyn RngCore,
    rho_target: Option<f64>,
    q_target: Option<f64>,
) -> Result<ConcentrationReport> {
    precondition(n_pairs >= 2, || format!("need at least 2 pairs, got {n_pairs}"))?;
    let stats: Vec<(f64, f64, f64)> = (0..n_pairs)
        .map(|_| {
            let x1 = source.sample(rng);
            let x2 = source.sample(rng);
            pair_statistics(&x1, &x2)
        })
        .collect();
    Ok(report_from_pairs(source.dim(), &stats, rho_target, q_target))
}

/// Builds a report from precomputed pair statistics.
pub fn report_from_pairs(
    n: usize,
    stats: &[(f64, f64, f64)],
    rho_target: Option<f64>,
    q_target: Option<f64>,
) -> ConcentrationReport {
    let norms: Vec<f64> = stats.iter().map(|s| 0.5 * (s.0 + s.1)).collect();
    let overlaps: Vec<f64> = stats.iter().map(|s| s.2).collect();
    let rho_hat = mean(&norms);
    let q_hat = mean(&overlaps);
    let rho = rho_target.unwrap_or(rho_hat);
    let q = q_target.unwrap_or(q_hat);
    let c1: Vec<f64> = stats.iter().map(|s| 0.5 * ((s.0 - rho).powi(2) + (s.1 - rho).powi(2))).collect();
    let c2: Vec<f64> = overlaps.iter().map(|r| (r - q).powi(2)).collect();
    let c1 = jackknife_mean(&c1);
    let c2 = jackknife_mean(&c2);
    let d = rates(c1.value, c2.value, n, rho, q.max(0.0)).expect("squares are nonnegative");
    ConcentrationReport {
        n,
        rho_hat,
        q_hat,
        rho,
        q,
        c1_hat: c1.value,
        c1_se: c1.se,
        c2_hat: c2.value,
        c2_se: c2.se,
        d1: d.d1,
        d2: d.d2,
        n_pairs: stats.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::LabRng;
    use crate::sources::{isotropic_gaussian, point_mass, sk_glauber, SkModel};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use std::sync::Arc;

    #[test]
    fn rates_examples() {
        let r = rates(0.0, 0.0, 50, 1.5, 0.0).unwrap();
        assert!((r.d1 - 1.5 * 100f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.d2, 0.0);
        assert_eq!(rates(1.0, 0.0, 1, 1.0, 0.0).unwrap().d1, 3.0);
        // 3·4·(1/4) + 4·2·1·(1/2) + 2·2·1 = 3 + 4 + 4
        assert_eq!(rates(0.0, 0.25, 2, 1.0, 1.0).unwrap().d2, 11f64.sqrt());
        assert!(rates(-1.0, 0.0, 1, 1.0, 0.0).is_err());
    }

    #[test]
    fn point_mass_has_zero_constants() {
        let src = point_mass(vec![1.0; 30]);
        let mut rng = LabRng::seed_from_u64(0);
        let r = concentration_report(&src, 10, &mut rng, Some(1.0), None).unwrap();
        assert_eq!((r.c1_hat, r.q_hat, r.c2_hat), (0.0, 1.0, 0.0));
    }

    #[test]
    fn sk_norm_is_exact() {
        let model = Arc::new(SkModel::from_seed(32, 0.3, 0.3, 1).unwrap());
        let src = sk_glauber(model, 10, 1).unwrap();
        let mut rng = LabRng::seed_from_u64(1);
        let r = concentration_report(&src, 20, &mut rng, Some(1.0), None).unwrap();
        assert_eq!(r.c1_hat, 0.0);
    }

    #[test]
    fn isotropic_overlap_matches_fourth_moment() {
        let src = isotropic_gaussian(400);
        let mut rng = LabRng::seed_from_u64(2);
        let r = concentration_report(&src, 4_000, &mut rng, Some(1.0), Some(0.0)).unwrap();
        let scaled = crate::stats::Estimate { value: 400.0 * r.c2_hat, se: 400.0 * r.c2_se };
        assert!(scaled.z_score(1.0).abs() < 4.0, "{scaled:?}");
    }

    proptest! {
        #[test]
        fn rates_are_monotone(a in 0.0f64..10.0, b in 0.0f64..10.0, n in 1usize..10_000, rho in 0.0f64..5.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let r_lo = rates(lo, lo, n, rho, rho / 2.0).unwrap();
            let r_hi = rates(hi, hi, n, rho, rho / 2.0).unwrap();
            prop_assert!(r_lo.d1 <= r_hi.d1 && r_lo.d2 <= r_hi.d2);
        }
    }
}

//! Decay-order checks across `N`, and the Wasserstein upper-bound consistency
//! check for the replicated projection law.

use serde::{Deserialize, Serialize};

use super::concentration::{concentration_report, ConcentrationReport};
use super::lhs::{catalog_sup, lhs_moment, LhsConfig, TheoremLhsEstimate};
use crate::error::{precondition, Error, Result};
use crate::metrics::{w1_exact_kd, TestCatalog};
use crate::projection::{sample_pn, sample_q, ThetaMode};
use crate::seed::{derive_seed, rng_at};
use crate::sources::{Targets, VectorSource};
use crate::stats::{jackknife_mean, ols_slope};

pub type SourceFamily<'a> = dyn Fn(usize) -> Result<Box<dyn VectorSource>> + Sync + 'a;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingPoint {
    pub n: usize,
    /// Catalog supremum at this `N`.
    pub sup: TheoremLhsEstimate,
    pub members: Vec<TheoremLhsEstimate>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub points: Vec<ScalingPoint>,
    /// Least-squares slope of `ln(sup)` against `ln N`; NaN if some estimate
    /// is not positive.
    pub slope: f64,
    /// Every consecutive pair decreases up to two combined standard errors.
    pub monotone: bool,
}

impl ScalingReport {
    pub fn passes(&self, gate: f64) -> bool {
        self.slope.is_finite() && self.slope <= gate
    }
}

/// Estimates the catalog supremum of the theorem's left-hand side at every
/// `N` and fits its log-log slope. Only the decay order is tested; the
/// theorem's constants are not estimated.
pub fn scaling_check(
    family: &SourceFamily<'_>,
    n_list: &[usize],
    catalog: &TestCatalog,
    cfg: &LhsConfig,
    seed: u64,
) -> Result<ScalingReport> {
    precondition(n_list.len() >= 3, || "need at least three values of N".into())?;
    precondition(n_list.windows(2).all(|w| w[0] < w[1]), || "N list must be increasing".into())?;
    let mut points = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let source = family(n)?;
        let members = lhs_moment(source.as_ref(), catalog, cfg, derive_seed(seed, &[("scaling-n", n as u64)]))?;
        let sup = catalog_sup(&members).cloned().ok_or_else(|| Error::Precondition("empty catalog".into()))?;
        points.push(ScalingPoint { n, sup, members });
    }
    Ok(summarize(points))
}

pub(crate) fn summarize(points: Vec<ScalingPoint>) -> ScalingReport {
    let slope = if points.iter().all(|p| p.sup.value > 0.0) {
        let xs: Vec<f64> = points.iter().map(|p| (p.n as f64).ln()).collect();
        let ys: Vec<f64> = points.iter().map(|p| p.sup.value.ln()).collect();
        ols_slope(&xs, &ys)
    } else {
        f64::NAN
    };
    let monotone = points.windows(2).all(|w| {
        let (a, b) = (&w[0].sup, &w[1].sup);
        b.value <= a.value + 2.0 * (a.se.powi(2) + b.se.powi(2)).sqrt()
    });
    ScalingReport { points, slope, monotone }
}

/// `32 p² k / √(ρ−q) / (N−1) · (d₁ + d₂)`.
pub fn w1_upper_bound(p: usize, k: usize, rho: f64, q: f64, n: usize, d1: f64, d2: f64) -> f64 {
    32.0 * (p * p * k) as f64 / (rho - q).sqrt() / (n as f64 - 1.0) * (d1 + d2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundPoint {
    pub n: usize,
    pub w1: f64,
    pub w1_se: f64,
    pub bound: f64,
    pub concentration: ConcentrationReport,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundConfig {
    pub p: usize,
    pub k: usize,
    pub cloud_size: usize,
    /// Independent cloud pairs; their spread gives the standard error.
    pub repeats: usize,
    pub concentration_pairs: usize,
}

/// Measures exact `W₁` between clouds from `P_N` and from `Q`, and compares it
/// with the upper bound evaluated at the measured concentration constants.
pub fn w1_bound_check(source: &dyn VectorSource, cfg: &BoundConfig, seed: u64) -> Result<BoundPoint> {
    precondition(cfg.repeats >= 2, || "need at least 2 repeats".into())?;
    let Targets { rho, q } = source.targets().ok_or_else(|| Error::Precondition("source declares no targets".into()))?;
    let n = source.dim();
    let conc = concentration_report(
        source,
        cfg.concentration_pairs,
        &mut rng_at(seed, &[("concentration", 0)]),
        Some(rho),
        Some(q),
    )?;
    let distances: Vec<f64> = (0..cfg.repeats)
        .map(|r| -> Result<f64> {
            let mut rng = rng_at(seed, &[("clouds", r as u64)]);
            let pn: Vec<Vec<f64>> = (0..cfg.cloud_size)
                .map(|_| sample_pn(source, cfg.p, cfg.k, &mut rng, ThetaMode::Fresh).map(|s| s.flatten()))
                .collect::<Result<_>>()?;
            let qq: Vec<Vec<f64>> = (0..cfg.cloud_size)
                .map(|_| sample_q(rho, q, cfg.p, cfg.k, &mut rng).map(|s| s.flatten()))
                .collect::<Result<_>>()?;
            w1_exact_kd(&pn, &qq)
        })
        .collect::<Result<_>>()?;
    let est = jackknife_mean(&distances);
    let bound = w1_upper_bound(cfg.p, cfg.k, rho, q, n, conc.d1, conc.d2);
    Ok(BoundPoint { n, w1: est.value, w1_se: est.se, bound, holds: est.value <= bound + 4.0 * est.se, concentration: conc })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sources::{point_mass, subgaussian_product, SubGaussianBase};
    use crate::verify::lhs::LhsVariant;

    #[test]
    fn bound_formula() {
        // p=1, k=1, ρ−q = 1/4, N = 3: 32·2/2·(d₁+d₂)
        assert_eq!(w1_upper_bound(1, 1, 0.5, 0.25, 3, 1.0, 2.0), 96.0);
    }

    #[test]
    fn degenerate_family_is_rejected() {
        let family = |n: usize| -> Result<Box<dyn VectorSource>> { Ok(Box::new(point_mass(vec![1.0; n]))) };
        let catalog = TestCatalog::generate(1, 1.0, 1.0, 2, 0).unwrap();
        let cfg = LhsConfig::new(LhsVariant::Full, 1, 1, 4);
        assert!(scaling_check(&family, &[8, 16, 32], &catalog, &cfg, 0).is_err());
        assert!(scaling_check(&family, &[8, 16], &catalog, &cfg, 0).is_err());
    }

    #[test]
    fn bound_holds_on_small_product_source() {
        let src = subgaussian_product(32, 1.0, 0.25, SubGaussianBase::RademacherShifted).unwrap();
        let cfg = BoundConfig { p: 1, k: 1, cloud_size: 64, repeats: 3, concentration_pairs: 200 };
        let pt = w1_bound_check(&src, &cfg, 1).unwrap();
        assert!(pt.holds, "{pt:?}");
        assert!(pt.w1 < pt.bound);
    }

    #[test]
    fn summary_flags_increase_and_nonpositive_values() {
        let mk = |n, value, se| ScalingPoint {
            n,
            sup: TheoremLhsEstimate { variant: LhsVariant::Full, p: 1, k: 1, g: "g".into(), value, se, outer_draws: 2, inner_replicas: 2 },
            members: vec![],
        };
        let r = summarize(vec![mk(10, 1.0, 0.01), mk(100, 0.1, 0.01), mk(1000, 0.01, 0.001)]);
        assert!((r.slope + 1.0).abs() < 1e-12 && r.monotone && r.passes(-0.4));
        let r = summarize(vec![mk(10, 1.0, 0.01), mk(100, 2.0, 0.01), mk(1000, -0.01, 0.1)]);
        assert!(r.slope.is_nan() && !r.monotone && !r.passes(-0.4));
    }
}

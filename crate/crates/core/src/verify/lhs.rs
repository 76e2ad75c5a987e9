//! Unbiased replica estimators of
//! `E_Θ [(⟨g(Θᵀx)⟩ − E_ξ g(m + √(ρ−q) ξ))^{2p}]`
//! with `m = Θᵀ⟨x⟩` (partial variant) or `m = √q z` (full variant).
//!
//! For one outer draw, `n` replicas give values `aᵢ = g(Θᵀxⁱ)` and `n` reference
//! draws give `bᵢ`. Expanding the power binomially,
//! `(Ea − Eb)^{2p} = Σ_r (−1)^{2p−r} C(2p, r) (Ea)^r (Eb)^{2p−r}`,
//! and every `(Ea)^r` is estimated without bias by the U-statistic
//! `e_r(a)/C(n, r)` over distinct replicas (`e_r` the elementary symmetric
//! polynomial). Both samples are first shifted by an independent held-out
//! estimate of `Eb`, which leaves the estimand unchanged and keeps the
//! alternating sum from cancelling catastrophically.

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::metrics::{TestCatalog, TestFunction};
use crate::projection::sample_directions;
use crate::seed::{fork_seed, rng_at};
use crate::sources::{Targets, VectorSource};
use crate::stats::{jackknife_mean, mean};

pub const DEFAULT_INNER_REPLICAS: usize = 4096;
const HELD_OUT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LhsVariant {
    /// Reference centred at `Θᵀ⟨x⟩`.
    Partial,
    /// Reference centred at `√q z`.
    Full,
}

/// How the Gaussian `z` of the full variant is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZCoupling {
    /// `z = Θᵀ⟨x⟩ / √(‖⟨x⟩‖²/N)`: exactly standard Gaussian, and the coupling
    /// under which the estimand can vanish when `q > 0`.
    #[default]
    ProjectedMean,
    /// `z` independent of `Θ`. For `q > 0` the estimand then tends to
    /// `2 Var g(√q z + √(ρ−q)ξ)` rather than to zero.
    Independent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LhsConfig {
    pub variant: LhsVariant,
    pub p: usize,
    pub k: usize,
    pub outer_draws: usize,
    pub inner_replicas: usize,
    #[serde(default)]
    pub coupling: ZCoupling,
    /// Overrides the source's declared `(ρ, q)`.
    #[serde(default)]
    pub targets: Option<Targets>,
}

impl LhsConfig {
    pub fn new(variant: LhsVariant, p: usize, k: usize, outer_draws: usize) -> Self {
        Self {
            variant,
            p,
            k,
            outer_draws,
            inner_replicas: DEFAULT_INNER_REPLICAS,
            coupling: ZCoupling::default(),
            targets: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TheoremLhsEstimate {
    pub variant: LhsVariant,
    pub p: usize,
    pub k: usize,
    pub g: String,
    pub value: f64,
    pub se: f64,
    pub outer_draws: usize,
    pub inner_replicas: usize,
}

impl TheoremLhsEstimate {
    /// The estimand is nonnegative; an unbiased estimate may dip below zero
    /// only within noise.
    pub fn is_plausible(&self) -> bool {
        self.value >= -3.0 * self.se
    }
}

/// `Σ_{r=1}^{n} (−1)^{r+1} C(n, r) = C(n, 0)`, i.e. `(1 − 1)^n = 0`.
pub fn alternating_binomial_identity(n: u32) -> bool {
    let mut sum = 0i128;
    for r in 1..=n {
        let sign = if r % 2 == 1 { 1 } else { -1 };
        sum += sign * binomial(n, r) as i128;
    }
    sum == 1
}

pub fn binomial(n: u32, r: u32) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

fn binomial_f64(n: usize, r: usize) -> f64 {
    if r > n {
        return 0.0;
    }
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Unbiased estimates of `(E v)^r`, `r = 0..=order`, from iid values `v`.
fn power_u_statistics(values: &[f64], order: usize) -> Vec<f64> {
    let mut e = vec![0.0; order + 1];
    e[0] = 1.0;
    for (seen, v) in values.iter().enumerate() {
        for r in (1..=order.min(seen + 1)).rev() {
            e[r] += v * e[r - 1];
        }
    }
    (0..=order).map(|r| e[r] / binomial_f64(values.len(), r)).collect()
}

/// Unbiased estimate of `(E a − E b)^{2p}` from independent iid samples,
/// after shifting both by `shift`.
pub fn replica_expansion(a: &[f64], b: &[f64], p: usize, shift: f64) -> f64 {
    let order = 2 * p;
    let sa: Vec<f64> = a.iter().map(|v| v - shift).collect();
    let sb: Vec<f64> = b.iter().map(|v| v - shift).collect();
    let ua = power_u_statistics(&sa, order);
    let ub = power_u_statistics(&sb, order);
    (0..=order)
        .map(|r| {
            let sign = if (order - r).is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * binomial_f64(order, r) * ua[r] * ub[order - r]
        })
        .sum()
}

/// The reference centre for one outer draw.
fn reference_centre(
    variant: LhsVariant,
    coupling: ZCoupling,
    projected_mean: Option<&[f64]>,
    q_n: f64,
    q: f64,
    k: usize,
    rng: &mut dyn RngCore,
) -> Vec<f64> {
    match (variant, coupling) {
        (LhsVariant::Partial, _) => projected_mean.expect("checked by caller").to_vec(),
        (LhsVariant::Full, _) if q == 0.0 => vec![0.0; k],
        (LhsVariant::Full, ZCoupling::ProjectedMean) => {
            let scale = (q / q_n).sqrt();
            projected_mean.expect("checked by caller").iter().map(|m| scale * m).collect()
        }
        (LhsVariant::Full, ZCoupling::Independent) => {
            (0..k).map(|_| q.sqrt() * rng.sample::<f64, _>(StandardNormal)).collect()
        }
    }
}

/// Replica-expansion estimates for every member of `catalog`, sharing the
/// same outer and inner draws. Outer draw `i` is seeded from `(seed, i)`, so
/// the result does not depend on the number of worker threads.
pub fn lhs_moment(
    source: &dyn VectorSource,
    catalog: &TestCatalog,
    cfg: &LhsConfig,
    seed: u64,
) -> Result<Vec<TheoremLhsEstimate>> {
    let n = source.dim();
    let LhsConfig { variant, p, k, outer_draws, inner_replicas, coupling, .. } = *cfg;
    precondition(p >= 1, || "p must be >= 1".into())?;
    precondition(outer_draws >= 2, || "need at least 2 outer draws".into())?;
    precondition(inner_replicas >= 2 * p, || format!("need at least 2p = {} inner replicas", 2 * p))?;
    precondition(catalog.k == k, || format!("catalog is for k={}, config has k={k}", catalog.k))?;
    for identity_order in [2u32, 4, 6, 8] {
        precondition(alternating_binomial_identity(identity_order), || "binomial identity failed".into())?;
    }
    let Targets { rho, q } = cfg
        .targets
        .or_else(|| source.targets())
        .ok_or_else(|| Error::Precondition("no (rho, q) targets declared".into()))?;
    precondition(q >= 0.0 && q < rho, || format!("need 0 <= q < rho, got rho={rho}, q={q}"))?;

    let needs_mean = variant == LhsVariant::Partial || (coupling == ZCoupling::ProjectedMean && q > 0.0);
    let mean_vec = source.mean_vector();
    if needs_mean && mean_vec.is_none() {
        return Err(Error::MissingMean);
    }
    let mean_vec = mean_vec.map(|m| m.values);
    let q_n = mean_vec.as_ref().map_or(0.0, |m| m.iter().map(|v| v * v).sum::<f64>() / n as f64);
    if variant == LhsVariant::Full && coupling == ZCoupling::ProjectedMean && q > 0.0 {
        precondition(q_n > 0.0, || "projected-mean coupling needs a nonzero mean vector".into())?;
    }
    let noise = (rho - q).sqrt();
    let members = &catalog.members;

    let per_outer: Vec<Vec<f64>> = (0..outer_draws)
        .into_par_iter()
        .map(|i| -> Result<Vec<f64>> {
            let mut rng = rng_at(seed, &[("outer", i as u64)]);
            let theta = sample_directions(n, k, &mut rng)?;
            let projected_mean = mean_vec.as_ref().map(|m| theta.project(m)).transpose()?;
            let centre = reference_centre(variant, coupling, projected_mean.as_deref(), q_n, q, k, &mut rng);

            let mut x = vec![0.0; n];
            let inner: Vec<Vec<f64>> = (0..inner_replicas)
                .map(|_| {
                    source.sample_into(&mut rng, &mut x);
                    theta.project(&x).expect("dimension checked")
                })
                .collect();
            let draw_ref = |count: usize, rng: &mut dyn RngCore| -> Vec<Vec<f64>> {
                (0..count)
                    .map(|_| centre.iter().map(|c| c + noise * rng.sample::<f64, _>(StandardNormal)).collect())
                    .collect()
            };
            let reference = draw_ref(inner_replicas, &mut rng);
            let held_out = draw_ref(HELD_OUT, &mut rng);

            Ok(members
                .iter()
                .map(|g| {
                    let a: Vec<f64> = inner.iter().map(|y| g.eval(y)).collect();
                    let b: Vec<f64> = reference.iter().map(|y| g.eval(y)).collect();
                    let shift = mean(&held_out.iter().map(|y| g.eval(y)).collect::<Vec<_>>());
                    replica_expansion(&a, &b, p, shift)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    Ok(members
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let col: Vec<f64> = per_outer.iter().map(|row| row[j]).collect();
            let est = jackknife_mean(&col);
            TheoremLhsEstimate {
                variant,
                p,
                k,
                g: g.id.clone(),
                value: est.value,
                se: est.se,
                outer_draws,
                inner_replicas,
            }
        })
        .collect())
}

/// The largest estimate in a catalog run (the finite-catalog supremum).
pub fn catalog_sup(estimates: &[TheoremLhsEstimate]) -> Option<&TheoremLhsEstimate> {
    estimates.iter().max_by(|a, b| a.value.total_cmp(&b.value))
}

fn single(
    variant: LhsVariant,
    source: &dyn VectorSource,
    g: &TestFunction,
    p: usize,
    k: usize,
    outer_draws: usize,
    rng: &mut dyn RngCore,
) -> Result<TheoremLhsEstimate> {
    let catalog = TestCatalog::from_members(vec![g.clone()], 0)?;
    let cfg = LhsConfig::new(variant, p, k, outer_draws);
    Ok(lhs_moment(source, &catalog, &cfg, fork_seed(rng))?.remove(0))
}

/// Partial-variant estimate for one test function with default inner size.
pub fn lhs_moment_partial(
    source: &dyn VectorSource,
    g: &TestFunction,
    p: usize,
    k: usize,
    outer_draws: usize,
    rng: &mut dyn RngCore,
) -> Result<TheoremLhsEstimate> {
    single(LhsVariant::Partial, source, g, p, k, outer_draws, rng)
}

/// Full-variant estimate (projected-mean coupling) for one test function.
pub fn lhs_moment_full(
    source: &dyn VectorSource,
    g: &TestFunction,
    p: usize,
    k: usize,
    outer_draws: usize,
    rng: &mut dyn RngCore,
) -> Result<TheoremLhsEstimate> {
    single(LhsVariant::Full, source, g, p, k, outer_draws, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::LabRng;
    use crate::sources::{isotropic_gaussian, point_mass, spiked_gaussian, subgaussian_product, SubGaussianBase};
    use crate::stats::Estimate;
    use rand::SeedableRng;

    #[test]
    fn binomial_identity_holds_for_even_orders() {
        for n in [2, 4, 6, 8] {
            assert!(alternating_binomial_identity(n));
        }
        assert_eq!(binomial(8, 4), 70);
    }

    #[test]
    fn u_statistics_are_exact_on_small_samples() {
        // e_2 of {1, 2, 3} = 11, C(3, 2) = 3
        let u = power_u_statistics(&[1.0, 2.0, 3.0], 3);
        assert_eq!(u, vec![1.0, 2.0, 11.0 / 3.0, 6.0]);
    }

    #[test]
    fn expansion_is_unbiased_for_a_known_gap() {
        // a ~ N(0.3, 1), b ~ N(0, 1): (Ea − Eb)^2 = 0.09, (…)^4 = 0.0081
        let mut rng = LabRng::seed_from_u64(5);
        for (p, target) in [(1usize, 0.09), (2, 0.0081)] {
            let vals: Vec<f64> = (0..4_000)
                .map(|_| {
                    let a: Vec<f64> = (0..16).map(|_| 0.3 + rng.sample::<f64, _>(StandardNormal)).collect();
                    let b: Vec<f64> = (0..16).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    replica_expansion(&a, &b, p, 0.1)
                })
                .collect();
            let est = jackknife_mean(&vals);
            assert!(est.z_score(target).abs() < 4.0, "p={p}: {est:?}");
        }
    }

    #[test]
    fn constant_test_function_gives_exact_zero() {
        let src = subgaussian_product(50, 1.0, 0.25, SubGaussianBase::Gaussian).unwrap();
        let g = TestFunction::constant(2, 0.7);
        let mut rng = LabRng::seed_from_u64(1);
        for variant in [LhsVariant::Partial, LhsVariant::Full] {
            for p in [1, 2] {
                let est = single(variant, &src, &g, p, 2, 8, &mut rng).unwrap();
                assert!(est.value.abs() < 1e-14, "{est:?}");
            }
        }
    }

    #[test]
    fn missing_mean_and_degenerate_targets_are_rejected() {
        struct NoMean;
        impl VectorSource for NoMean {
            fn dim(&self) -> usize {
                4
            }
            fn sample_into(&self, _: &mut dyn RngCore, out: &mut [f64]) {
                out.fill(1.0);
            }
            fn mean_vector(&self) -> Option<crate::sources::MeanVector> {
                None
            }
            fn targets(&self) -> Option<Targets> {
                Some(Targets { rho: 1.0, q: 0.5 })
            }
            fn describe(&self) -> String {
                "no-mean".into()
            }
        }
        let g = TestFunction::coordinate(1, 0, 1.0, 1.0).unwrap();
        let mut rng = LabRng::seed_from_u64(0);
        assert!(matches!(lhs_moment_partial(&NoMean, &g, 1, 1, 4, &mut rng), Err(Error::MissingMean)));
        let degenerate = point_mass(vec![1.0; 8]);
        assert!(lhs_moment_full(&degenerate, &g, 1, 1, 4, &mut rng).is_err());
    }

    /// Direct nested Monte Carlo: plug-in means with many inner draws.
    fn nested_oracle(
        mu: &[f64],
        rho: f64,
        q: f64,
        g: &TestFunction,
        outer: usize,
        inner: usize,
        rng: &mut LabRng,
    ) -> Estimate {
        let n = mu.len();
        let vals: Vec<f64> = (0..outer)
            .map(|_| {
                let theta = sample_directions(n, 1, rng).unwrap();
                let m = theta.project(mu).unwrap()[0];
                let gx = g.eval(&[m]);
                let s = (rho - q).sqrt();
                let gref =
                    (0..inner).map(|_| g.eval(&[m + s * rng.sample::<f64, _>(StandardNormal)])).sum::<f64>() / inner as f64;
                (gx - gref).powi(2)
            })
            .collect();
        jackknife_mean(&vals)
    }

    #[test]
    fn point_mass_matches_nested_monte_carlo() {
        // x ≡ μ with declared ρ > q = ‖μ‖²/N: the gap is g(Θᵀμ) − E g(Θᵀμ + √(ρ−q)ξ)
        let n = 40;
        let mu = vec![0.5; n];
        let src = point_mass(mu.clone());
        let g = TestFunction::coordinate(1, 0, 1.0, 1.0).unwrap();
        let catalog = TestCatalog::from_members(vec![g.clone()], 0).unwrap();
        let mut cfg = LhsConfig::new(LhsVariant::Partial, 1, 1, 2_000);
        cfg.inner_replicas = 64;
        cfg.targets = Some(Targets { rho: 1.25, q: 0.25 });
        let est = lhs_moment(&src, &catalog, &cfg, 3).unwrap().remove(0);
        let mut rng = LabRng::seed_from_u64(4);
        let oracle = nested_oracle(&mu, 1.25, 0.25, &g, 2_000, 20_000, &mut rng);
        let z = (est.value - oracle.value) / (est.se.powi(2) + oracle.se.powi(2)).sqrt();
        assert!(z.abs() < 4.0, "{est:?} vs {oracle:?}");
    }

    #[test]
    fn variants_agree_on_centred_source() {
        let src = isotropic_gaussian(30);
        let catalog = TestCatalog::generate(2, 1.0, 1.0, 4, 2).unwrap();
        let mut cfg = LhsConfig::new(LhsVariant::Partial, 1, 2, 400);
        cfg.inner_replicas = 256;
        let part = lhs_moment(&src, &catalog, &cfg, 10).unwrap();
        cfg.variant = LhsVariant::Full;
        let full = lhs_moment(&src, &catalog, &cfg, 11).unwrap();
        for (a, b) in part.iter().zip(&full) {
            let z = (a.value - b.value) / (a.se.powi(2) + b.se.powi(2)).sqrt();
            assert!(z.abs() < 4.0, "{a:?} vs {b:?}");
            assert!(a.is_plausible() && b.is_plausible());
        }
    }

    #[test]
    fn deterministic_across_thread_counts() {
        let src = subgaussian_product(20, 1.0, 0.25, SubGaussianBase::RademacherShifted).unwrap();
        let catalog = TestCatalog::generate(1, 1.0, 1.0, 3, 1).unwrap();
        let mut cfg = LhsConfig::new(LhsVariant::Full, 1, 1, 16);
        cfg.inner_replicas = 32;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| lhs_moment(&src, &catalog, &cfg, 99).unwrap())
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn independent_coupling_does_not_vanish_when_q_positive() {
        // Exactly Gaussian source matching the target: with z coupled to Θᵀ⟨x⟩
        // the estimand is tiny; with an independent z it is ≈ 2 Var ⟨g⟩_z.
        let n = 200;
        let src = spiked_gaussian(vec![0.5; n], vec![0.5f64.sqrt(); n]).unwrap();
        let g = TestFunction::coordinate(1, 0, 1.0, 1.0).unwrap();
        let catalog = TestCatalog::from_members(vec![g], 0).unwrap();
        let mut cfg = LhsConfig::new(LhsVariant::Full, 1, 1, 200);
        cfg.inner_replicas = 128;
        let coupled = lhs_moment(&src, &catalog, &cfg, 5).unwrap().remove(0);
        cfg.coupling = ZCoupling::Independent;
        let indep = lhs_moment(&src, &catalog, &cfg, 5).unwrap().remove(0);
        assert!(indep.value > 0.1, "{indep:?}");
        assert!(coupled.value < 0.02, "{coupled:?}");
    }
}

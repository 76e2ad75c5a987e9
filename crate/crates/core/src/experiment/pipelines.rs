//! The six experiment kinds. Each pipeline writes its CSV files through
//! [`Output`] and returns its gated checks.

use std::sync::Arc;

use rayon::prelude::*;

use super::config::{ExperimentConfig, ExperimentKind, SourceSpec};
use super::{Cell, Check, Output, Table};
use crate::error::Result;
use crate::haar::{drift_check, moment_suite, suite_seed};
use crate::metrics::TestCatalog;
use crate::seed::{derive_seed, rng_at};
use crate::sources::sk::{fixed_point_residual, sk_fixed_point, SkModel};
use crate::sources::{sk_glauber, SubGaussianBase, VectorSource};
use crate::verify::concentration::{pair_statistics, report_from_pairs};
use crate::verify::{
    converse_cosh, converse_laplace, isotropic_cosh_reference, isotropic_laplace_reference, scaling_check, sk_cavity,
    w1_bound_check, wrong_q_lower_bound, BoundConfig, LhsConfig,
};

/// Largest tolerated `max/min` ratio of `N·ĉ₂` across `N`.
const NC2_RATIO_GATE: f64 = 3.0;
/// Fixed-point residual tolerated by the independent quadrature.
const FIXED_POINT_GATE: f64 = 1e-10;

pub(super) fn execute(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    match cfg.kind {
        ExperimentKind::Concentration => concentration(cfg, out),
        ExperimentKind::TheoremScaling => theorem_scaling(cfg, out),
        ExperimentKind::SkCavity => cavity(cfg, out),
        ExperimentKind::Converse => converse(cfg, out),
        ExperimentKind::HaarMoments => haar(cfg, out),
        ExperimentKind::MetricsSelftest => selftest(cfg, out),
    }
}

/// The source at dimension `n`. SK disorder is drawn from the run's seed tree;
/// `with_mean` attaches an estimated magnetization vector.
fn build_source(cfg: &ExperimentConfig, n: usize, with_mean: bool) -> Result<Box<dyn VectorSource>> {
    let disorder = derive_seed(cfg.master_seed, &[("disorder", n as u64)]);
    match cfg.source {
        SourceSpec::Sk { beta, h, burnin, thin } if with_mean => {
            let model = Arc::new(SkModel::from_seed(n, beta, h, disorder)?);
            let mut rng = rng_at(cfg.master_seed, &[("sk-mean", n as u64)]);
            Ok(Box::new(sk_glauber(model, burnin, thin)?.with_estimated_mean(cfg.sk.mean_samples, &mut rng)))
        }
        ref spec => spec.build(n, disorder),
    }
}

/// `max/min` of positive values; infinite if some value is not positive.
fn spread_ratio(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    if min > 0.0 {
        max / min
    } else {
        f64::INFINITY
    }
}

/// Each consecutive pair decreases up to two combined standard errors.
fn decreasing(values: &[(f64, f64)]) -> bool {
    values.windows(2).all(|w| w[1].0 <= w[0].0 + 2.0 * (w[0].1.powi(2) + w[1].1.powi(2)).sqrt())
}

fn concentration(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let mut table = Table::new(&[
        "n", "rho", "q", "rho_hat", "q_hat", "c1_hat", "c1_se", "c2_hat", "c2_se", "n_c2", "d1", "d2", "n_pairs",
    ]);
    let mut checks = Vec::new();
    let mut nc2 = Vec::new();
    for &n in &cfg.n_list {
        let source = build_source(cfg, n, false)?;
        let targets = source.targets();
        let seed = derive_seed(cfg.master_seed, &[("concentration", n as u64)]);
        let stats: Vec<(f64, f64, f64)> = (0..cfg.pairs)
            .into_par_iter()
            .map(|i| {
                let mut rng = rng_at(seed, &[("pair", i as u64)]);
                let x1 = source.sample(&mut rng);
                let x2 = source.sample(&mut rng);
                pair_statistics(&x1, &x2)
            })
            .collect();
        let r = report_from_pairs(n, &stats, targets.map(|t| t.rho), targets.map(|t| t.q));
        let n_c2 = n as f64 * r.c2_hat;
        nc2.push(n_c2);
        table.push(&[
            Cell::U(n as u64),
            Cell::F(r.rho),
            Cell::F(r.q),
            Cell::F(r.rho_hat),
            Cell::F(r.q_hat),
            Cell::F(r.c1_hat),
            Cell::F(r.c1_se),
            Cell::F(r.c2_hat),
            Cell::F(r.c2_se),
            Cell::F(n_c2),
            Cell::F(r.d1),
            Cell::F(r.d2),
            Cell::U(r.n_pairs as u64),
        ]);
        if cfg.source.is_sk() {
            checks.push(Check::new(format!("c1_hat == 0 at N={n}"), r.c1_hat == 0.0, r.c1_hat, "== 0"));
        }
    }
    out.table("concentration.csv", &table)?;
    if nc2.len() >= 2 {
        checks.push(Check::at_most("max/min of N*c2_hat across N", spread_ratio(&nc2), NC2_RATIO_GATE));
    }
    Ok(checks)
}

fn theorem_scaling(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let catalog = TestCatalog::generate(cfg.k, 1.0, 1.0, cfg.catalog_size, cfg.catalog_seed)?;
    let mut lhs = LhsConfig::new(cfg.variant, cfg.p, cfg.k, cfg.outer_draws);
    lhs.inner_replicas = cfg.inner_draws;
    lhs.coupling = cfg.coupling;
    let family = |n: usize| build_source(cfg, n, true);
    let report = scaling_check(&family, &cfg.n_list, &catalog, &lhs, derive_seed(cfg.master_seed, &[("scaling", 0)]))?;

    let mut all = Table::new(&["n", "g", "value", "se", "outer_draws", "inner_replicas"]);
    let mut sup = Table::new(&["n", "g", "value", "se", "outer_draws", "inner_replicas"]);
    let mut plausible = true;
    for pt in &report.points {
        let row = |est: &crate::verify::TheoremLhsEstimate, table: &mut Table| {
            table.push(&[
                Cell::U(pt.n as u64),
                Cell::S(&est.g),
                Cell::F(est.value),
                Cell::F(est.se),
                Cell::U(est.outer_draws as u64),
                Cell::U(est.inner_replicas as u64),
            ])
        };
        pt.members.iter().for_each(|m| row(m, &mut all));
        row(&pt.sup, &mut sup);
        plausible &= pt.sup.is_plausible();
    }
    out.table("scaling.csv", &all)?;
    out.table("scaling_sup.csv", &sup)?;

    let gate = cfg.profile.slope_gate();
    let mut checks = vec![
        Check::at_most("log-log slope of the catalog sup", report.slope, gate),
        Check::new("sup nonincreasing in N up to 2 SE", report.monotone, f64::NAN, "consecutive decrease within 2 SE"),
        Check::new("catalog sup >= -3 SE at every N", plausible, f64::NAN, "value >= -3 se"),
    ];

    if cfg.bound.enabled {
        let bcfg = BoundConfig {
            p: cfg.bound.p,
            k: cfg.bound.k,
            cloud_size: cfg.bound.cloud_size,
            repeats: cfg.bound.repeats,
            concentration_pairs: cfg.bound.concentration_pairs,
        };
        let mut table = Table::new(&["n", "w1", "w1_se", "bound", "c1_hat", "c2_hat", "d1", "d2", "holds"]);
        for &n in &cfg.n_list {
            let source = build_source(cfg, n, false)?;
            let pt = w1_bound_check(source.as_ref(), &bcfg, derive_seed(cfg.master_seed, &[("bound", n as u64)]))?;
            table.push(&[
                Cell::U(n as u64),
                Cell::F(pt.w1),
                Cell::F(pt.w1_se),
                Cell::F(pt.bound),
                Cell::F(pt.concentration.c1_hat),
                Cell::F(pt.concentration.c2_hat),
                Cell::F(pt.concentration.d1),
                Cell::F(pt.concentration.d2),
                Cell::B(pt.holds),
            ]);
            checks.push(Check::new(
                format!("W1 <= bound + 4 SE at N={n}"),
                pt.holds,
                pt.w1,
                format!("<= {:.6e} + 4 SE", pt.bound),
            ));
        }
        out.table("bound.csv", &table)?;
    }
    Ok(checks)
}

fn cavity(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let sk = &cfg.sk;
    let q = sk_fixed_point(sk.beta, sk.h)?;
    let residual = fixed_point_residual(sk.beta, sk.h, q);
    let mut checks =
        vec![Check::at_most("|fixed-point residual| (independent quadrature)", residual.abs(), FIXED_POINT_GATE)];

    let seed = derive_seed(cfg.master_seed, &[("sk-cavity", 0)]);
    let mut summary = Table::new(&["n", "q", "c1_hat", "n_c2", "n_c2_se", "w1", "w1_se"]);
    let mut per_disorder =
        Table::new(&["n", "disorder", "disorder_seed", "max_norm_deviation", "c2_hat", "q_n", "w1"]);
    let mut nc2 = Vec::new();
    let mut w1 = Vec::new();
    for &n in &cfg.n_list {
        let r = sk_cavity(n, sk, seed)?;
        summary.push(&[
            Cell::U(n as u64),
            Cell::F(r.q),
            Cell::F(r.c1_hat),
            Cell::F(r.n_c2),
            Cell::F(r.n_c2_se),
            Cell::F(r.w1),
            Cell::F(r.w1_se),
        ]);
        for (d, dr) in r.disorders.iter().enumerate() {
            per_disorder.push(&[
                Cell::U(n as u64),
                Cell::U(d as u64),
                Cell::U(dr.disorder_seed),
                Cell::F(dr.max_norm_deviation),
                Cell::F(dr.c2_hat),
                Cell::F(dr.q_n),
                Cell::F(dr.w1),
            ]);
        }
        let name = format!("disorder_N{n}_d0.skdz");
        SkModel::from_seed(n, sk.beta, sk.h, r.disorders[0].disorder_seed)?.write_disorder(&out.dir().join(&name))?;
        out.record(&name);

        checks.push(Check::new(format!("c1_hat == 0 at N={n}"), r.c1_hat == 0.0, r.c1_hat, "== 0"));
        nc2.push(r.n_c2);
        w1.push((r.w1, r.w1_se));
    }
    out.table("sk_cavity.csv", &summary)?;
    out.table("sk_disorders.csv", &per_disorder)?;

    if nc2.len() >= 2 {
        checks.push(Check::at_most("max/min of N*c2_hat across N", spread_ratio(&nc2), NC2_RATIO_GATE));
        let (first, last) = (w1[0], w1[w1.len() - 1]);
        let slack = 2.0 * (first.1.powi(2) + last.1.powi(2)).sqrt();
        checks.push(Check::at_most("cavity W1 at largest N vs smallest N (+2 SE)", last.0, first.0 + slack));
    }
    Ok(checks)
}

fn converse(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let p = &cfg.converse;
    let isotropic = matches!(cfg.source, SourceSpec::Isotropic)
        || matches!(cfg.source, SourceSpec::SubgaussianProduct { rho, q, base: SubGaussianBase::Gaussian } if rho == 1.0 && q == 0.0);
    let mut cosh = Table::new(&["n", "q_target", "value", "se", "reference"]);
    let mut laplace = Table::new(&["n", "lambda", "lhs", "lhs_se", "rhs", "gap", "reference"]);
    let mut wrong = Table::new(&["n", "q_target", "value", "se", "lower_bound"]);
    let mut checks = Vec::new();
    let mut cosh_values = Vec::new();

    for &n in &cfg.n_list {
        let source = build_source(cfg, n, false)?;
        let t = source.targets().ok_or_else(|| {
            crate::Error::Precondition(format!("source {} declares no (rho, q) targets", source.describe()))
        })?;
        let tag = |label: &str| rng_at(cfg.master_seed, &[(label, n as u64)]);

        let est = converse_cosh(source.as_ref(), t.q, p.pairs, &mut tag("converse-cosh"))?;
        let reference = if isotropic { isotropic_cosh_reference(n) } else { f64::NAN };
        cosh.push(&[Cell::U(n as u64), Cell::F(t.q), Cell::F(est.value), Cell::F(est.se), Cell::F(reference)]);
        cosh_values.push((est.value, est.se));

        for lp in converse_laplace(source.as_ref(), t.rho, &p.lambdas, p.laplace_samples, &mut tag("converse-laplace"))? {
            let reference = if isotropic { isotropic_laplace_reference(n, lp.lambda) } else { f64::NAN };
            laplace.push(&[
                Cell::U(n as u64),
                Cell::F(lp.lambda),
                Cell::F(lp.lhs),
                Cell::F(lp.lhs_se),
                Cell::F(lp.rhs),
                Cell::F(lp.gap),
                Cell::F(reference),
            ]);
            if isotropic {
                let z = if lp.lhs_se > 0.0 { (lp.lhs - reference) / lp.lhs_se } else { 0.0 };
                checks.push(Check::at_most(format!("|z| Laplace vs chi-square at N={n}, lambda={}", lp.lambda), z.abs(), 4.0));
            }
        }

        let q_wrong = t.q + p.wrong_q_offset;
        let bound = wrong_q_lower_bound(t.rho);
        let w = converse_cosh(source.as_ref(), q_wrong, p.pairs, &mut tag("converse-wrong-q"))?;
        wrong.push(&[Cell::U(n as u64), Cell::F(q_wrong), Cell::F(w.value), Cell::F(w.se), Cell::F(bound)]);
        if p.wrong_q_offset.abs() == 0.5 {
            checks.push(Check::at_least(format!("wrong-q probe at N={n} vs half the lower bound"), w.value, 0.5 * bound));
        }

        if isotropic && n == *cfg.n_list.last().unwrap_or(&n) {
            checks.push(Check::at_most(format!("|z| cosh vs exact series at N={n}"), est.z_score(reference).abs(), 4.0));
        }
    }
    out.table("converse_cosh.csv", &cosh)?;
    out.table("converse_laplace.csv", &laplace)?;
    out.table("converse_wrong_q.csv", &wrong)?;

    if cosh_values.len() >= 2 {
        checks.push(Check::new(
            "cosh functional decreasing in N up to 2 SE",
            decreasing(&cosh_values),
            f64::NAN,
            "consecutive decrease within 2 SE",
        ));
    }
    Ok(checks)
}

fn haar(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let hp = &cfg.haar;
    let mut moments = Table::new(&["n", "statistic", "oracle", "estimate", "se", "z"]);
    let mut checks = Vec::new();
    for &n in &hp.orders {
        let suite = moment_suite(n, hp.draws, suite_seed(cfg.master_seed, n))?;
        for m in &suite {
            moments.push(&[
                Cell::U(n as u64),
                Cell::S(&m.label),
                Cell::F(m.oracle),
                Cell::F(m.estimate),
                Cell::F(m.se),
                Cell::F(m.z),
            ]);
        }
        let worst = suite.iter().map(|m| m.z.abs()).fold(0.0, f64::max);
        checks.push(Check::at_most(format!("max |z| of Haar moments at n={n}"), worst, 4.0));
    }
    out.table("haar_moments.csv", &moments)?;

    let mut drift = Table::new(&["estimator", "component", "theta", "drift", "se", "z"]);
    for (i, &estimator) in hp.drift_estimators.iter().enumerate() {
        let mut rng = rng_at(cfg.master_seed, &[("drift", i as u64)]);
        let r = drift_check(hp.drift_n, hp.drift_epsilon, hp.drift_samples, estimator, &mut rng)?;
        let name = serde_json::to_value(estimator)?.as_str().unwrap_or_default().to_string();
        for c in 0..r.n {
            drift.push(&[
                Cell::S(&name),
                Cell::U(c as u64),
                Cell::F(r.theta[c]),
                Cell::F(r.drift[c]),
                Cell::F(r.std_errors[c]),
                Cell::F(r.z_scores[c]),
            ]);
        }
        checks.push(Check::at_most(format!("max |z| of drift ({name})"), r.max_abs_z, 5.0));
    }
    out.table("drift.csv", &drift)?;
    Ok(checks)
}

fn selftest(cfg: &ExperimentConfig, out: &mut Output<'_>) -> Result<Vec<Check>> {
    let suites = crate::selftest::run_all(cfg.master_seed)?;
    let mut table = Table::new(&["suite", "instances", "max_error", "tolerance", "passed"]);
    for s in &suites {
        table.push(&[
            Cell::S(&s.name),
            Cell::U(s.instances as u64),
            Cell::F(s.max_error),
            Cell::F(s.tolerance),
            Cell::B(s.passed()),
        ]);
    }
    out.table("selftest.csv", &table)?;
    Ok(suites.iter().map(|s| Check::at_most(&s.name, s.max_error, s.tolerance)).collect())
}

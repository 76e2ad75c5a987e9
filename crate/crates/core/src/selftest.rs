//! Oracle suites for the algebraic and metric building blocks, runnable from
//! the command line without any experiment config.

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrics::{lipschitz_product_check, marginal, w1_1d, w1_exact_kd, TestCatalog};
use crate::rs_algebra::{rs_build, sigma_inv_sqrt_opnorm, KronCovariance};
use crate::seed::rng_at;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub instances: usize,
    /// Largest observed error (or violation count, for the Lipschitz suite).
    pub max_error: f64,
    pub tolerance: f64,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.max_error <= self.tolerance
    }
}

/// All suites, each on its own stream derived from `seed`.
pub fn run_all(seed: u64) -> Result<Vec<SuiteResult>> {
    let mut out = rs_algebra_suites(&mut rng_at(seed, &[("selftest-rs", 0)]), 200)?;
    out.push(w1_1d_suite(&mut rng_at(seed, &[("selftest-w1-1d", 0)]), 50)?);
    out.push(translation_suite(&mut rng_at(seed, &[("selftest-translation", 0)]), 20)?);
    out.push(marginal_suite(&mut rng_at(seed, &[("selftest-marginal", 0)]), 100)?);
    out.push(lipschitz_suite(&mut rng_at(seed, &[("selftest-lipschitz", 0)]), 10_000)?);
    Ok(out)
}

fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// Inverse, spectrum and `‖Σ^{-1/2}‖` of replica-symmetric matrices against
/// dense linear algebra.
pub fn rs_algebra_suites(rng: &mut dyn RngCore, instances: usize) -> Result<Vec<SuiteResult>> {
    let (mut inv_err, mut eig_err, mut norm_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let m = rng.random_range(1..=16usize);
        let rho = rng.random_range(0.5..2.0);
        // Any q keeping both eigenvalues positive, including negative ones.
        let lo = if m > 1 { -0.9 * rho / (m as f64 - 1.0) } else { -0.9 * rho };
        let q = rng.random_range(lo..0.95 * rho);
        let r = rs_build(m, rho, q);
        let dense = r.densify();

        let product = r.inverse()?.densify() * &dense;
        inv_err = inv_err.max(max_abs_diff(&product, &DMatrix::identity(m, m)));

        let mut numeric: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        numeric.sort_by(f64::total_cmp);
        let s = r.eigvals();
        let mut closed = vec![s.rest; s.rest_multiplicity];
        closed.push(s.top);
        closed.sort_by(f64::total_cmp);
        let e = numeric.iter().zip(&closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        eig_err = eig_err.max(e);

        let q_pos = rng.random_range(0.0..0.95 * rho);
        let expected = sigma_inv_sqrt_opnorm(rho, q_pos)?;
        for p in 1..=3 {
            for k in 1..=3 {
                let inv_sqrt = KronCovariance::replicated(p, k, rho, q_pos).inv_sqrt()?;
                let numeric = inv_sqrt.singular_values().max();
                norm_err = norm_err.max((numeric - expected).abs());
            }
        }
    }
    let suite = |name: &str, max_error, tolerance| SuiteResult { name: name.into(), instances, max_error, tolerance };
    Ok(vec![
        suite("rs inverse * R = I", inv_err, 1e-12),
        suite("rs eigenvalues vs dense", eig_err, 1e-12),
        suite("sigma^-1/2 operator norm", norm_err, 1e-10),
    ])
}

/// Minimum over all `n!` matchings: by Birkhoff–von Neumann the transport LP
/// between uniform measures with `n` atoms attains its optimum at a permutation.
pub fn lp_transport_1d(a: &[f64], b: &[f64]) -> f64 {
    fn search(i: usize, a: &[f64], b: &[f64], used: &mut [bool], acc: f64, best: &mut f64) {
        if i == a.len() {
            *best = best.min(acc);
            return;
        }
        for j in 0..b.len() {
            if !used[j] {
                used[j] = true;
                search(i + 1, a, b, used, acc + (a[i] - b[j]).abs(), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    search(0, a, b, &mut vec![false; b.len()], 0.0, &mut best);
    best / a.len() as f64
}

fn gaussian_vec(rng: &mut dyn RngCore, len: usize, scale: f64) -> Vec<f64> {
    (0..len).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect()
}

fn cloud(rng: &mut dyn RngCore, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| gaussian_vec(rng, dim, 1.0)).collect()
}

pub fn w1_1d_suite(rng: &mut dyn RngCore, instances: usize) -> Result<SuiteResult> {
    let mut err = 0.0f64;
    for _ in 0..instances {
        let a = gaussian_vec(rng, 6, 1.0);
        let b: Vec<f64> = gaussian_vec(rng, 6, 2.0).iter().map(|v| v + 0.5).collect();
        err = err.max((w1_1d(&a, &b)? - lp_transport_1d(&a, &b)).abs());
    }
    Ok(SuiteResult { name: "w1_1d vs transport LP".into(), instances, max_error: err, tolerance: 1e-12 })
}

/// Translating a cloud by `v` moves it exactly `‖v‖` in `W₁`.
pub fn translation_suite(rng: &mut dyn RngCore, instances: usize) -> Result<SuiteResult> {
    let mut err = 0.0f64;
    for _ in 0..instances {
        let dim = rng.random_range(1..=4usize);
        let a = cloud(rng, 40, dim);
        let v = gaussian_vec(rng, dim, 3.0);
        let b: Vec<Vec<f64>> = a.iter().map(|x| x.iter().zip(&v).map(|(p, s)| p + s).collect()).collect();
        let norm = v.iter().map(|s| s * s).sum::<f64>().sqrt();
        err = err.max((w1_exact_kd(&a, &b)? - norm).abs());
    }
    Ok(SuiteResult { name: "w1_exact_kd translation".into(), instances, max_error: err, tolerance: 1e-10 })
}

/// `W₁` of any coordinate marginal never exceeds the joint `W₁`; the error is
/// the largest excess.
pub fn marginal_suite(rng: &mut dyn RngCore, instances: usize) -> Result<SuiteResult> {
    let mut excess = 0.0f64;
    for _ in 0..instances {
        let dim = rng.random_range(2..=5usize);
        let n = rng.random_range(4..=32usize);
        let a = cloud(rng, n, dim);
        let b = cloud(rng, n, dim);
        let joint = w1_exact_kd(&a, &b)?;
        let coords: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.5)).collect();
        let coords = if coords.is_empty() { vec![0] } else { coords };
        let marg = w1_exact_kd(&marginal(&a, &coords), &marginal(&b, &coords))?;
        excess = excess.max(marg - joint);
    }
    Ok(SuiteResult { name: "marginal W1 <= joint W1".into(), instances, max_error: excess, tolerance: 1e-12 })
}

/// Violations of `|F_r(x) − F_r(y)| ≤ r L M^{r−1} |x − y|` for `r ≤ 4`, over
/// a coordinate map, a ridge and a product from a seeded catalog.
pub fn lipschitz_suite(rng: &mut dyn RngCore, trials: usize) -> Result<SuiteResult> {
    let catalog = TestCatalog::generate(2, 1.0, 1.0, 8, 11)?;
    let picks = [&catalog.members[0], &catalog.members[2], &catalog.members[catalog.len() - 1]];
    let mut violations = 0;
    for g in picks {
        for r in 1..=4 {
            violations += lipschitz_product_check(g, r, trials, rng)?.violations;
        }
    }
    Ok(SuiteResult {
        name: "Lipschitz product bound violations".into(),
        instances: picks.len() * 4 * trials,
        max_error: violations as f64,
        tolerance: 0.0,
    })
}

//! Haar-distributed orthogonal matrices, closed-form entry moments, and the
//! small random rotation that drives the exchangeable-pair construction.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::seed::{derive_seed, fork_seed, rng_at};
use crate::stats::Estimate;

const MAX_DRAW_ATTEMPTS: usize = 3;

/// An `n × n` orthogonal matrix, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthogonalMatrix {
    n: usize,
    data: Vec<f64>,
}

impl OrthogonalMatrix {
    pub fn order(&self) -> usize {
        self.n
    }

    /// Entry `(i, j)`, zero-based.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[j * self.n + i]
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.data[j * self.n..(j + 1) * self.n]
    }

    pub fn to_dmatrix(&self) -> DMatrix<f64> {
        DMatrix::from_column_slice(self.n, self.n, &self.data)
    }

    /// `max |UᵀU − I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..self.n {
            for b in 0..=a {
                let dot: f64 = self.column(a).iter().zip(self.column(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }
}

/// Orthonormalizes `cols` (column-major, `n` rows) in place by Gram–Schmidt
/// with one reorthogonalization pass. Returns `false` when a column is
/// numerically dependent on its predecessors.
///
/// Gram–Schmidt yields the QR factor whose triangular part has a positive
/// diagonal, which is the convention under which `Q` of a Gaussian matrix is
/// Haar distributed.
fn orthonormalize(cols: &mut [f64], n: usize, count: usize) -> bool {
    for j in 0..count {
        let (done, rest) = cols.split_at_mut(j * n);
        let v = &mut rest[..n];
        let original: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for _pass in 0..2 {
            for i in 0..j {
                let u = &done[i * n..(i + 1) * n];
                let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
                for (x, ui) in v.iter_mut().zip(u) {
                    *x -= dot * ui;
                }
            }
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 1e-10 * original) || original == 0.0 {
            return false;
        }
        for x in v.iter_mut() {
            *x /= norm;
        }
    }
    true
}

fn gaussian_columns<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<f64> {
    (0..n * count).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Draws an `n × n` orthogonal matrix from Haar measure.
pub fn sample_haar<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<OrthogonalMatrix> {
    precondition(n >= 2, || format!("Haar sampling needs n >= 2, got {n}"))?;
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let mut data = gaussian_columns(n, n, rng);
        if orthonormalize(&mut data, n, n) {
            return Ok(OrthogonalMatrix { n, data });
        }
    }
    Err(Error::DegenerateDraw(MAX_DRAW_ATTEMPTS))
}

/// The first two columns of a Haar matrix, drawn without forming the rest.
/// Gram–Schmidt is sequential, so these have exactly the law of the first two
/// columns of [`sample_haar`].
fn haar_two_frame<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Vec<f64>> {
    for _ in 0..MAX_DRAW_ATTEMPTS {
        let mut data = gaussian_columns(n, 2, rng);
        if orthonormalize(&mut data, n, 2) {
            return Ok(data);
        }
    }
    Err(Error::DegenerateDraw(MAX_DRAW_ATTEMPTS))
}

/// A monomial `u_{i₁j₁} ⋯ u_{i_r j_r}` in the entries of `U`, indices one-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentPattern {
    pub factors: Vec<(usize, usize)>,
}

impl MomentPattern {
    pub fn new(factors: &[(usize, usize)]) -> Self {
        Self { factors: factors.to_vec() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        for &(i, j) in &self.factors {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::Index(format!("entry ({i},{j}) outside 1..={n}")));
            }
        }
        Ok(())
    }

    /// Evaluates the monomial on a concrete matrix.
    pub fn evaluate(&self, u: &OrthogonalMatrix) -> f64 {
        self.factors.iter().map(|&(i, j)| u.get(i - 1, j - 1)).product()
    }

    fn label(&self) -> String {
        self.factors.iter().map(|(i, j)| format!("u{i}{j}")).collect::<Vec<_>>().join("*")
    }
}

/// Exact `E[pattern]` under Haar measure on `O(n)`.
///
/// Covered cases: any pattern with an odd count in some row or column (zero);
/// `u_ij²`; `u_ij² u_ij'²` in a shared row or column; `u_ij² u_i'j'²` in
/// disjoint rows and columns; and the 2×2 minor product
/// `u_ij u_ij' u_i'j u_i'j'`. A single entry to the fourth power is not covered.
pub fn haar_moment_oracle(n: usize, pattern: &MomentPattern) -> Result<f64> {
    pattern.validate(n)?;
    let f = &pattern.factors;
    if !matches!(f.len(), 1 | 2 | 4) {
        return Err(Error::UnsupportedPattern(format!("degree {} ({})", f.len(), pattern.label())));
    }
    let odd_line = |key: fn(&(usize, usize)) -> usize| {
        let mut counts = std::collections::BTreeMap::new();
        for e in f {
            *counts.entry(key(e)).or_insert(0usize) += 1;
        }
        counts.values().any(|c| c % 2 == 1)
    };
    if odd_line(|e| e.0) || odd_line(|e| e.1) {
        return Ok(0.0);
    }
    let nf = n as f64;
    if f.len() == 2 {
        // even counts with two factors force the same entry twice
        return Ok(1.0 / nf);
    }
    let mut distinct: Vec<(usize, usize)> = f.clone();
    distinct.sort_unstable();
    distinct.dedup();
    match distinct.len() {
        2 => {
            let (a, b) = (distinct[0], distinct[1]);
            if a.0 == b.0 || a.1 == b.1 {
                Ok(1.0 / (nf * (nf + 2.0)))
            } else {
                Ok((nf + 1.0) / ((nf - 1.0) * nf * (nf + 2.0)))
            }
        }
        4 => Ok(-1.0 / ((nf - 1.0) * nf * (nf + 2.0))),
        _ => Err(Error::UnsupportedPattern(pattern.label())),
    }
}

fn check_minor_indices(n: usize, idx: [usize; 4]) -> Result<()> {
    let [i, k, j, l] = idx;
    if idx.iter().any(|&x| x == 0 || x > n) {
        return Err(Error::Index(format!("indices {idx:?} outside 1..={n}")));
    }
    precondition(i != k && j != l, || format!("need i != k and j != l, got {idx:?}"))
}

/// `E[(u_i1 u_k2 − u_i2 u_k1)(u_j1 u_ℓ2 − u_j2 u_ℓ1)] = 2/(n(n−1))·(δ_ij δ_kℓ − δ_iℓ δ_kj)`.
pub fn minor_covariance_oracle(n: usize, i: usize, k: usize, j: usize, l: usize) -> Result<f64> {
    check_minor_indices(n, [i, k, j, l])?;
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let nf = n as f64;
    Ok(2.0 / (nf * (nf - 1.0)) * (d(i, j) * d(k, l) - d(i, l) * d(k, j)))
}

/// Same covariance when the two minors come from independent Haar matrices: zero.
pub fn independent_minor_covariance_oracle(
    n: usize,
    i: usize,
    k: usize,
    j: usize,
    l: usize,
) -> Result<f64> {
    check_minor_indices(n, [i, k, j, l])?;
    Ok(0.0)
}

/// `u_i1 u_k2 − u_i2 u_k1`, one-based rows.
pub fn column_minor(u: &OrthogonalMatrix, i: usize, k: usize) -> f64 {
    u.get(i - 1, 0) * u.get(k - 1, 1) - u.get(i - 1, 1) * u.get(k - 1, 0)
}

fn rotation_delta(frame: &[f64], theta: &[f64], epsilon: f64) -> (f64, f64, f64, f64) {
    let n = theta.len();
    let (k1, k2) = frame.split_at(n);
    let a: f64 = k1.iter().zip(theta).map(|(x, y)| x * y).sum();
    let b: f64 = k2.iter().zip(theta).map(|(x, y)| x * y).sum();
    let c = (1.0 - epsilon * epsilon).sqrt();
    // (A_ε − I) acting on the plane coordinates (a, b)
    ((c - 1.0) * a + epsilon * b, -epsilon * a + (c - 1.0) * b, a, b)
}

/// `U A_ε Uᵀ θ` for a fresh Haar `U`, where `A_ε` rotates the first coordinate
/// plane clockwise by `arcsin ε` and fixes the rest. Only the first two columns
/// of `U` enter, so only those are drawn.
pub fn rotate_random_plane<R: Rng + ?Sized>(theta: &[f64], epsilon: f64, rng: &mut R) -> Result<Vec<f64>> {
    precondition(epsilon > 0.0 && epsilon < 1.0, || format!("epsilon must lie in (0,1), got {epsilon}"))?;
    let n = theta.len();
    precondition(n >= 2, || "rotation needs dimension >= 2".into())?;
    let frame = haar_two_frame(n, rng)?;
    let (d1, d2, _, _) = rotation_delta(&frame, theta, epsilon);
    let (k1, k2) = frame.split_at(n);
    Ok(theta.iter().enumerate().map(|(i, t)| t + d1 * k1[i] + d2 * k2[i]).collect())
}

/// How the drift expectation is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriftEstimator {
    /// One rotation per sample.
    Plain,
    /// Each Haar frame is used for both `A_ε` and `A_{−ε} = A_εᵀ`. Swapping the two
    /// frame columns preserves Haar measure and maps one onto the other, so the
    /// pair average is unbiased; the `O(1/ε)` odd term cancels exactly.
    Antithetic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DriftReport {
    pub n: usize,
    pub epsilon: f64,
    pub n_samples: usize,
    pub estimator: DriftEstimator,
    pub theta: Vec<f64>,
    /// `(n/ε²)·Ê[θ^ε − θ | θ]` per component.
    pub drift: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Componentwise `(drift_i + θ_i)/se_i`.
    pub z_scores: Vec<f64>,
    pub max_abs_z: f64,
    /// Set when some component deviates from `−θ` by more than 3 standard errors.
    pub bias_flagged: bool,
}

const DRIFT_BLOCK: usize = 4096;

/// Monte Carlo check of `(n/ε²)·E[θ^ε − θ | θ] = −θ` for a fixed θ ~ N(0, I/n).
pub fn drift_check<R: Rng + ?Sized>(
    n: usize,
    epsilon: f64,
    n_samples: usize,
    estimator: DriftEstimator,
    rng: &mut R,
) -> Result<DriftReport> {
    precondition(epsilon > 0.0 && epsilon < 1.0, || format!("epsilon must lie in (0,1), got {epsilon}"))?;
    precondition(n >= 2 && n_samples >= 2, || "need n >= 2 and at least two samples".into())?;
    let scale = 1.0 / (n as f64).sqrt();
    let theta: Vec<f64> = (0..n).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    let master = fork_seed(rng);
    let factor = n as f64 / (epsilon * epsilon);

    let blocks = n_samples.div_ceil(DRIFT_BLOCK);
    let partials: Vec<Result<(Vec<f64>, Vec<f64>)>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut brng = rng_at(master, &[("drift-block", b as u64)]);
            let count = DRIFT_BLOCK.min(n_samples - b * DRIFT_BLOCK);
            let mut sum = vec![0.0; n];
            let mut sum_sq = vec![0.0; n];
            let mut step = vec![0.0; n];
            for _ in 0..count {
                let frame = haar_two_frame(n, &mut brng)?;
                let (d1, d2, a, b2) = rotation_delta(&frame, &theta, epsilon);
                let (e1, e2) = match estimator {
                    DriftEstimator::Plain => (d1, d2),
                    DriftEstimator::Antithetic => {
                        let c = (1.0 - epsilon * epsilon).sqrt();
                        ((c - 1.0) * a, (c - 1.0) * b2)
                    }
                };
                let (k1, k2) = frame.split_at(n);
                for i in 0..n {
                    step[i] = factor * (e1 * k1[i] + e2 * k2[i]);
                    sum[i] += step[i];
                    sum_sq[i] += step[i] * step[i];
                }
            }
            Ok((sum, sum_sq))
        })
        .collect();

    let mut sum = vec![0.0; n];
    let mut sum_sq = vec![0.0; n];
    for part in partials {
        let (s, s2) = part?;
        for i in 0..n {
            sum[i] += s[i];
            sum_sq[i] += s2[i];
        }
    }
    let m = n_samples as f64;
    let mut drift = Vec::with_capacity(n);
    let mut std_errors = Vec::with_capacity(n);
    let mut z_scores = Vec::with_capacity(n);
    for i in 0..n {
        let mean = sum[i] / m;
        let var = ((sum_sq[i] - m * mean * mean) / (m - 1.0)).max(0.0);
        let est = Estimate { value: mean, se: (var / m).sqrt() };
        drift.push(mean);
        std_errors.push(est.se);
        z_scores.push(est.z_score(-theta[i]));
    }
    let max_abs_z = z_scores.iter().fold(0.0f64, |acc, z| acc.max(z.abs()));
    Ok(DriftReport {
        n,
        epsilon,
        n_samples,
        estimator,
        theta,
        drift,
        std_errors,
        z_scores,
        max_abs_z,
        bias_flagged: max_abs_z > 3.0,
    })
}

/// One Monte Carlo moment comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentCheck {
    pub label: String,
    pub oracle: f64,
    pub estimate: f64,
    pub se: f64,
    pub z: f64,
}

enum Statistic {
    Pattern(MomentPattern),
    /// `E[u_11^r − u_23^r] = 0` (identical entry laws).
    EntryLaw(u32),
    Minor([usize; 4]),
    IndependentMinor([usize; 4]),
}

/// Monte Carlo reproduction of the Haar entry-moment identities at order `n ≥ 4`.
/// Deterministic in `seed`, independent of the worker count.
pub fn moment_suite(n: usize, draws: usize, seed: u64) -> Result<Vec<MomentCheck>> {
    precondition(n >= 4, || format!("moment suite needs n >= 4, got {n}"))?;
    let p = MomentPattern::new;
    let mut stats: Vec<(String, Statistic, f64)> = Vec::new();
    let patterns = [
        p(&[(1, 1)]),
        p(&[(1, 1), (1, 1)]),
        p(&[(n, n), (n, n)]),
        p(&[(1, 1), (1, 1), (1, 2), (1, 2)]),
        p(&[(1, 1), (1, 1), (2, 1), (2, 1)]),
        p(&[(1, 1), (1, 1), (2, 2), (2, 2)]),
        p(&[(1, 1), (1, 1), (1, 1), (2, 1)]),
        p(&[(1, 1), (1, 2), (2, 1), (2, 3)]),
        p(&[(1, 1), (1, 2), (2, 1), (2, 2)]),
        p(&[(2, 3), (2, 4), (3, 3), (3, 4)]),
    ];
    for pat in patterns {
        let oracle = haar_moment_oracle(n, &pat)?;
        stats.push((format!("E[{}]", pat.label()), Statistic::Pattern(pat), oracle));
    }
    for r in 1..=4 {
        stats.push((format!("E[u11^{r} - u23^{r}]"), Statistic::EntryLaw(r), 0.0));
    }
    for idx in [[1, 2, 1, 2], [1, 2, 2, 1], [1, 2, 3, 4], [2, 3, 2, 3]] {
        let oracle = minor_covariance_oracle(n, idx[0], idx[1], idx[2], idx[3])?;
        stats.push((format!("minor{idx:?}"), Statistic::Minor(idx), oracle));
    }
    for idx in [[1, 2, 1, 2], [1, 2, 2, 1]] {
        let oracle = independent_minor_covariance_oracle(n, idx[0], idx[1], idx[2], idx[3])?;
        stats.push((format!("independent-minor{idx:?}"), Statistic::IndependentMinor(idx), oracle));
    }

    let s = stats.len();
    const BLOCK: usize = 8192;
    let blocks = draws.div_ceil(BLOCK);
    let partials: Vec<Result<Vec<(f64, f64)>>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_at(seed, &[("haar-moments", n as u64), ("block", b as u64)]);
            let count = BLOCK.min(draws - b * BLOCK);
            let mut acc = vec![(0.0, 0.0); s];
            for _ in 0..count {
                let u = sample_haar(n, &mut rng)?;
                let v = sample_haar(n, &mut rng)?;
                for (slot, (_, stat, _)) in acc.iter_mut().zip(&stats) {
                    let x = match stat {
                        Statistic::Pattern(pat) => pat.evaluate(&u),
                        Statistic::EntryLaw(r) => {
                            u.get(0, 0).powi(*r as i32) - u.get(1, 2).powi(*r as i32)
                        }
                        Statistic::Minor([i, k, j, l]) => {
                            column_minor(&u, *i, *k) * column_minor(&u, *j, *l)
                        }
                        Statistic::IndependentMinor([i, k, j, l]) => {
                            column_minor(&u, *i, *k) * column_minor(&v, *j, *l)
                        }
                    };
                    slot.0 += x;
                    slot.1 += x * x;
                }
            }
            Ok(acc)
        })
        .collect();

    let mut totals = vec![(0.0, 0.0); s];
    for part in partials {
        for (t, (a, b)) in totals.iter_mut().zip(part?) {
            t.0 += a;
            t.1 += b;
        }
    }
    let m = draws as f64;
    Ok(stats
        .into_iter()
        .zip(totals)
        .map(|((label, _, oracle), (sum, sum_sq))| {
            let mean = sum / m;
            let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
            let est = Estimate { value: mean, se: (var / m).sqrt() };
            MomentCheck { label, oracle, estimate: mean, se: est.se, z: est.z_score(oracle) }
        })
        .collect())
}

/// Seed for the moment suite at order `n` under `master`.
pub fn suite_seed(master: u64, n: usize) -> u64 {
    derive_seed(master, &[("haar-suite", n as u64)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::LabRng;
    use rand::SeedableRng;

    #[test]
    fn samples_are_orthogonal_with_unit_determinant() {
        let mut rng = LabRng::seed_from_u64(1);
        for n in [2, 4, 7, 16] {
            let u = sample_haar(n, &mut rng).unwrap();
            assert!(u.orthogonality_defect() < 1e-10);
            let det = u.to_dmatrix().determinant();
            assert!((det.abs() - 1.0).abs() < 1e-8);
        }
        assert!(sample_haar(1, &mut rng).is_err());
    }

    #[test]
    fn oracle_examples() {
        let o = |f: &[(usize, usize)]| haar_moment_oracle(4, &MomentPattern::new(f)).unwrap();
        assert_eq!(o(&[(1, 1), (1, 1)]), 0.25);
        assert!((o(&[(1, 1), (1, 1), (1, 2), (1, 2)]) - 1.0 / 24.0).abs() < 1e-15);
        assert!((o(&[(1, 1), (1, 2), (2, 1), (2, 2)]) + 1.0 / 72.0).abs() < 1e-15);
        assert_eq!(o(&[(1, 1), (1, 1), (1, 1), (2, 1)]), 0.0);
        assert_eq!(o(&[(3, 2)]), 0.0);
        assert_eq!(o(&[(1, 1), (2, 2)]), 0.0);
        assert!((o(&[(1, 1), (1, 1), (2, 2), (2, 2)]) - 5.0 / (3.0 * 4.0 * 6.0)).abs() < 1e-15);
    }

    #[test]
    fn oracle_rejects_bad_patterns() {
        let bad = MomentPattern::new(&[(1, 1); 4]);
        assert!(matches!(haar_moment_oracle(4, &bad), Err(Error::UnsupportedPattern(_))));
        let three = MomentPattern::new(&[(1, 1); 3]);
        assert!(matches!(haar_moment_oracle(4, &three), Err(Error::UnsupportedPattern(_))));
        let out = MomentPattern::new(&[(5, 1), (5, 1)]);
        assert!(matches!(haar_moment_oracle(4, &out), Err(Error::Index(_))));
    }

    #[test]
    fn minor_oracle_examples() {
        assert!((minor_covariance_oracle(5, 1, 2, 1, 2).unwrap() - 0.1).abs() < 1e-15);
        assert!((minor_covariance_oracle(5, 1, 2, 2, 1).unwrap() + 0.1).abs() < 1e-15);
        assert_eq!(minor_covariance_oracle(5, 1, 2, 3, 4).unwrap(), 0.0);
        assert!(matches!(minor_covariance_oracle(5, 1, 6, 1, 2), Err(Error::Index(_))));
        assert!(minor_covariance_oracle(5, 1, 1, 1, 2).is_err());
        assert_eq!(independent_minor_covariance_oracle(5, 1, 2, 1, 2).unwrap(), 0.0);
    }

    #[test]
    fn entry_mean_and_second_moment_at_n6() {
        let mut rng = LabRng::seed_from_u64(11);
        let draws = 100_000;
        let (mut s1, mut s2, mut s4) = (0.0, 0.0, 0.0);
        for _ in 0..draws {
            let u = sample_haar(6, &mut rng).unwrap();
            let x = u.get(0, 0);
            s1 += x;
            s2 += x * x;
            s4 += x.powi(4);
        }
        let m = draws as f64;
        let mean = s1 / m;
        let se1 = (s2 / m - mean * mean).sqrt() / m.sqrt();
        assert!(mean.abs() < 4.0 * se1);
        let m2 = s2 / m;
        let se2 = (s4 / m - m2 * m2).sqrt() / m.sqrt();
        assert!((m2 - 1.0 / 6.0).abs() < 4.0 * se2);
    }

    #[test]
    fn rotation_preserves_norm_and_vanishes_as_epsilon_shrinks() {
        let mut rng = LabRng::seed_from_u64(5);
        let theta: Vec<f64> = (0..30).map(|i| (i as f64 * 0.37).sin()).collect();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for eps in [1e-8, 0.02, 0.5, 0.99] {
            let out = rotate_random_plane(&theta, eps, &mut rng).unwrap();
            assert!((norm(&out) - norm(&theta)).abs() < 1e-10);
        }
        let out = rotate_random_plane(&theta, 1e-8, &mut rng).unwrap();
        let dev: Vec<f64> = out.iter().zip(&theta).map(|(a, b)| a - b).collect();
        assert!(norm(&dev) <= 1e-6 * norm(&theta));
        assert!(rotate_random_plane(&theta, 0.0, &mut rng).is_err());
        assert!(rotate_random_plane(&theta, 1.0, &mut rng).is_err());
    }

    #[test]
    fn drift_matches_minus_theta_at_n50() {
        let mut rng = LabRng::seed_from_u64(2024);
        let rep = drift_check(50, 0.05, 100_000, DriftEstimator::Plain, &mut rng).unwrap();
        assert!(rep.max_abs_z <= 5.0, "max z {}", rep.max_abs_z);
    }

    #[test]
    fn drift_flags_large_epsilon() {
        let mut rng = LabRng::seed_from_u64(99);
        let rep = drift_check(20, 0.5, 200_000, DriftEstimator::Antithetic, &mut rng).unwrap();
        assert!(rep.bias_flagged, "max z {}", rep.max_abs_z);
        let mut rng = LabRng::seed_from_u64(99);
        let ok = drift_check(20, 0.02, 200_000, DriftEstimator::Antithetic, &mut rng).unwrap();
        assert!(ok.max_abs_z <= 5.0);
    }

    #[test]
    fn drift_is_deterministic() {
        let a = drift_check(20, 0.02, 10_000, DriftEstimator::Plain, &mut LabRng::seed_from_u64(3)).unwrap();
        let b = drift_check(20, 0.02, 10_000, DriftEstimator::Plain, &mut LabRng::seed_from_u64(3)).unwrap();
        assert_eq!(a.drift, b.drift);
        assert_eq!(a.max_abs_z, b.max_abs_z);
    }
}

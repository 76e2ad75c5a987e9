//! Samplers for random vectors `x ∈ R^N`.
//!
//! A [`VectorSource`] is a fixed law `⟨·⟩`; successive calls with independent
//! generators give independent replicas `x¹, x², …`. Disordered sources (the
//! SK model) are a family of such laws indexed by the disorder, see [`sk`].

pub mod sk;

use rand::{Rng, RngCore};
use rand_distr::{StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Result};

pub use sk::{sk_fixed_point, sk_glauber, SkGibbsSource, SkModel};

/// The mean `⟨x⟩`, either known in closed form or estimated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanVector {
    pub values: Vec<f64>,
    /// `false` when the mean was estimated by Monte Carlo.
    pub exact: bool,
}

impl MeanVector {
    /// `‖⟨x⟩‖²/N`.
    pub fn overlap(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.values.len() as f64
    }
}

/// Declared thin-shell / overlap constants `(ρ, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Targets {
    pub rho: f64,
    pub q: f64,
}

pub trait VectorSource: Send + Sync {
    fn dim(&self) -> usize;

    /// Writes one draw into `out` (length [`dim`](Self::dim)).
    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]);

    fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.sample_into(rng, &mut out);
        out
    }

    /// `count` draws of one replica stream. Sources whose draws are expensive
    /// (Markov chains) may return serially correlated draws from one chain;
    /// draws from separate calls are always independent.
    fn sample_batch(&self, count: usize, rng: &mut dyn RngCore) -> Vec<Vec<f64>> {
        (0..count).map(|_| self.sample(rng)).collect()
    }

    fn mean_vector(&self) -> Option<MeanVector>;

    fn targets(&self) -> Option<Targets>;

    /// Eigenvalues of `Cov x`, when known.
    fn covariance_spectrum(&self) -> Option<Vec<f64>> {
        None
    }

    fn describe(&self) -> String;
}

/// Base law of the centered, unit-variance coordinate noise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubGaussianBase {
    Gaussian,
    RademacherShifted,
    UniformShifted,
}

impl SubGaussianBase {
    fn draw(self, rng: &mut dyn RngCore) -> f64 {
        match self {
            Self::Gaussian => rng.sample(StandardNormal),
            Self::RademacherShifted => {
                if rng.random::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            Self::UniformShifted => {
                let u: f64 = rng.sample(Uniform::new(-1.0, 1.0).expect("valid range"));
                3f64.sqrt() * u
            }
        }
    }
}

/// Independent coordinates with mean `√q` and variance `ρ − q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubGaussianProduct {
    pub n: usize,
    pub rho: f64,
    pub q: f64,
    pub base: SubGaussianBase,
}

pub fn subgaussian_product(n: usize, rho: f64, q: f64, base: SubGaussianBase) -> Result<SubGaussianProduct> {
    precondition(n >= 1, || "dimension must be positive".into())?;
    precondition(q >= 0.0 && q < rho, || format!("need 0 <= q < rho, got rho={rho}, q={q}"))?;
    Ok(SubGaussianProduct { n, rho, q, base })
}

impl VectorSource for SubGaussianProduct {
    fn dim(&self) -> usize {
        self.n
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        let shift = self.q.sqrt();
        let scale = (self.rho - self.q).sqrt();
        for x in out.iter_mut() {
            *x = shift + scale * self.base.draw(rng);
        }
    }

    fn mean_vector(&self) -> Option<MeanVector> {
        Some(MeanVector { values: vec![self.q.sqrt(); self.n], exact: true })
    }

    fn targets(&self) -> Option<Targets> {
        Some(Targets { rho: self.rho, q: self.q })
    }

    fn covariance_spectrum(&self) -> Option<Vec<f64>> {
        Some(vec![self.rho - self.q; self.n])
    }

    fn describe(&self) -> String {
        format!("subgaussian-product(N={}, rho={}, q={}, {:?})", self.n, self.rho, self.q, self.base)
    }
}

/// Gaussian with diagonal covariance `diag(spectrum)` and the given mean.
/// A zero spectrum is a point mass at `mean`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpikedGaussian {
    pub spectrum: Vec<f64>,
    pub mean: Vec<f64>,
    stddev: Vec<f64>,
}

pub fn spiked_gaussian(spectrum: Vec<f64>, mean: Vec<f64>) -> Result<SpikedGaussian> {
    precondition(!spectrum.is_empty(), || "dimension must be positive".into())?;
    precondition(spectrum.len() == mean.len(), || {
        format!("spectrum has length {} but mean has length {}", spectrum.len(), mean.len())
    })?;
    precondition(spectrum.iter().all(|l| *l >= 0.0 && l.is_finite()), || {
        "spectrum entries must be finite and nonnegative".into()
    })?;
    let stddev = spectrum.iter().map(|l| l.sqrt()).collect();
    Ok(SpikedGaussian { spectrum, mean, stddev })
}

/// `N(0, I_N)`.
pub fn isotropic_gaussian(n: usize) -> SpikedGaussian {
    spiked_gaussian(vec![1.0; n], vec![0.0; n]).expect("valid isotropic parameters")
}

/// Covariance `diag(√N, 1, …, 1)`: overlap still concentrates although the top
/// eigenvalue grows with `N`.
pub fn single_spike_gaussian(n: usize) -> SpikedGaussian {
    let mut spectrum = vec![1.0; n];
    spectrum[0] = (n as f64).sqrt();
    spiked_gaussian(spectrum, vec![0.0; n]).expect("valid spiked parameters")
}

/// Deterministic vector.
pub fn point_mass(value: Vec<f64>) -> SpikedGaussian {
    spiked_gaussian(vec![0.0; value.len()], value).expect("valid point mass")
}

impl VectorSource for SpikedGaussian {
    fn dim(&self) -> usize {
        self.mean.len()
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        for ((x, m), s) in out.iter_mut().zip(&self.mean).zip(&self.stddev) {
            *x = if *s == 0.0 { *m } else { m + s * rng.sample::<f64, _>(StandardNormal) };
        }
    }

    fn mean_vector(&self) -> Option<MeanVector> {
        Some(MeanVector { values: self.mean.clone(), exact: true })
    }

    /// Finite-`N` values `ρ_N = (tr Cov + ‖μ‖²)/N`, `q_N = ‖μ‖²/N`.
    fn targets(&self) -> Option<Targets> {
        let n = self.dim() as f64;
        let q = self.mean.iter().map(|m| m * m).sum::<f64>() / n;
        let rho = self.spectrum.iter().sum::<f64>() / n + q;
        Some(Targets { rho, q })
    }

    fn covariance_spectrum(&self) -> Option<Vec<f64>> {
        Some(self.spectrum.clone())
    }

    fn describe(&self) -> String {
        format!("spiked-gaussian(N={})", self.dim())
    }
}

/// Right-hand side of the overlap-vs-covariance bound
/// `⟨(x¹·x²/N − q_N)²⟩ ≤ ‖λ‖²/N² + (2/N)·max λ·q_N`.
pub fn overlap_bound(spectrum: &[f64], q_n: f64) -> f64 {
    let n = spectrum.len() as f64;
    let sq: f64 = spectrum.iter().map(|l| l * l).sum();
    let top = spectrum.iter().copied().fold(0.0, f64::max);
    sq / (n * n) + 2.0 / n * top * q_n
}

/// Exact `⟨(x¹·x²/N − q_N)²⟩` for a Gaussian with diagonal covariance:
/// `(Σλᵢ² + 2 Σλᵢμᵢ²)/N²`.
pub fn gaussian_overlap_variance(spectrum: &[f64], mean: &[f64]) -> f64 {
    let n = spectrum.len() as f64;
    let a: f64 = spectrum.iter().map(|l| l * l).sum();
    let b: f64 = spectrum.iter().zip(mean).map(|(l, m)| l * m * m).sum();
    (a + 2.0 * b) / (n * n)
}

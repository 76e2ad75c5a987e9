//! Sherrington–Kirkpatrick Gibbs measures sampled by heat-bath Glauber dynamics.
//!
//! `−H_N(x) = (β/√N) Σ_{i<j} g_ij x_i x_j + h Σ_i x_i` on `{±1}^N`. The
//! couplings `g_ij` are the disorder; conditional on them the Gibbs measure is a
//! fixed law and independent chains give independent replicas. Mixing is
//! assumed, not checked; it is fast at high temperature (β well below 1/2).

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;

use super::{MeanVector, Targets, VectorSource};
use crate::error::{precondition, Error, Result};
use crate::quadrature::GaussHermite;
use crate::seed::LabRng;

pub const DEFAULT_BURNIN: usize = 200;
pub const DEFAULT_THIN: usize = 10;
pub const DEFAULT_MEAN_SAMPLES: usize = 10_000;

const DISORDER_MAGIC: &[u8; 4] = b"SKDZ";

/// One disorder realization of the SK model.
#[derive(Debug, Clone)]
pub struct SkModel {
    n: usize,
    beta: f64,
    h: f64,
    seed: u64,
    /// `g_ij` for `i < j`, row-major upper triangle.
    couplings: Vec<f64>,
    /// Dense symmetric `(β/√N) g_ij`, zero diagonal.
    interaction: Vec<f64>,
}

impl SkModel {
    /// Draws the disorder from `seed`.
    pub fn from_seed(n: usize, beta: f64, h: f64, seed: u64) -> Result<Self> {
        let mut rng = LabRng::seed_from_u64(seed);
        let couplings = (0..n * n.saturating_sub(1) / 2).map(|_| rng.sample(StandardNormal)).collect();
        Self::from_couplings(n, beta, h, couplings, seed)
    }

    pub fn from_couplings(n: usize, beta: f64, h: f64, couplings: Vec<f64>, seed: u64) -> Result<Self> {
        precondition(n >= 2, || "SK model needs at least two spins".into())?;
        precondition(beta >= 0.0, || format!("beta must be >= 0, got {beta}"))?;
        let expected = n * (n - 1) / 2;
        if couplings.len() != expected {
            return Err(Error::LengthMismatch(couplings.len(), expected));
        }
        let scale = beta / (n as f64).sqrt();
        let mut interaction = vec![0.0; n * n];
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                let v = scale * couplings[idx];
                interaction[i * n + j] = v;
                interaction[j * n + i] = v;
                idx += 1;
            }
        }
        Ok(Self { n, beta, h, seed, couplings, interaction })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn h(&self) -> f64 {
        self.h
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    /// `−H_N(x)`.
    pub fn neg_hamiltonian(&self, x: &[f64]) -> f64 {
        let n = self.n;
        let mut pair = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                pair += self.interaction[i * n + j] * x[i] * x[j];
            }
        }
        pair + self.h * x.iter().sum::<f64>()
    }

    /// Writes the disorder: `"SKDZ"`, u32 N, u64 seed, then the upper-triangular
    /// couplings as little-endian f64, row-major.
    pub fn write_disorder(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(DISORDER_MAGIC)?;
        let n = u32::try_from(self.n).map_err(|_| Error::Format("N does not fit in u32".into()))?;
        w.write_all(&n.to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        for g in &self.couplings {
            w.write_all(&g.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads a disorder file written by [`write_disorder`](Self::write_disorder).
    /// `β` and `h` are not part of the file.
    pub fn read_disorder(path: &Path, beta: f64, h: f64) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != DISORDER_MAGIC {
            return Err(Error::Format("bad disorder magic".into()));
        }
        let n = u32::from_le_bytes(header[4..8].try_into().expect("4 bytes")) as usize;
        let seed = u64::from_le_bytes(header[8..16].try_into().expect("8 bytes"));
        let count = n * n.saturating_sub(1) / 2;
        let mut body = Vec::new();
        r.read_to_end(&mut body)?;
        if body.len() != count * 8 {
            return Err(Error::Format(format!(
                "expected {} coupling bytes for N={n}, found {}",
                count * 8,
                body.len()
            )));
        }
        let couplings = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
        Self::from_couplings(n, beta, h, couplings, seed)
    }
}

/// A single Glauber chain with incrementally maintained local fields.
struct Chain<'a> {
    model: &'a SkModel,
    state: Vec<f64>,
    field: Vec<f64>,
}

impl<'a> Chain<'a> {
    fn new(model: &'a SkModel, rng: &mut dyn RngCore) -> Self {
        let n = model.n;
        let state: Vec<f64> = (0..n).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let field = (0..n)
            .map(|i| {
                let row = &model.interaction[i * n..(i + 1) * n];
                model.h + row.iter().zip(&state).map(|(j, x)| j * x).sum::<f64>()
            })
            .collect();
        Self { model, state, field }
    }

    /// One heat-bath sweep over the sites in order:
    /// `P(x_i = +1 | rest) = (1 + tanh f_i)/2` with `f_i = Σ_j J_ij x_j + h`.
    fn sweep(&mut self, rng: &mut dyn RngCore) {
        let n = self.model.n;
        for i in 0..n {
            let p_up = 0.5 * (1.0 + self.field[i].tanh());
            let new = if rng.random::<f64>() < p_up { 1.0 } else { -1.0 };
            if new != self.state[i] {
                let delta = new - self.state[i];
                self.state[i] = new;
                let row = &self.model.interaction[i * n..(i + 1) * n];
                for (f, j) in self.field.iter_mut().zip(row) {
                    *f += j * delta;
                }
            }
        }
    }
}

/// The Gibbs measure of one disorder realization, sampled by independent
/// heat-bath chains.
#[derive(Debug, Clone)]
pub struct SkGibbsSource {
    model: Arc<SkModel>,
    burnin: usize,
    thin: usize,
    mean: Option<MeanVector>,
}

/// Gibbs sampler for `model`: every replica is a fresh chain run for `burnin`
/// sweeps; batched draws are taken every `thin` sweeps thereafter.
pub fn sk_glauber(model: Arc<SkModel>, burnin: usize, thin: usize) -> Result<SkGibbsSource> {
    precondition(burnin >= 1 && thin >= 1, || "burnin and thin must be >= 1".into())?;
    Ok(SkGibbsSource { model, burnin, thin, mean: None })
}

impl SkGibbsSource {
    pub fn model(&self) -> &SkModel {
        &self.model
    }

    /// Estimates `⟨x⟩` from one chain of `kept` post-burnin sweeps, averaging the
    /// conditional means `tanh f_i` rather than the spins themselves.
    pub fn estimate_mean(&self, kept: usize, rng: &mut dyn RngCore) -> MeanVector {
        let n = self.model.n;
        let mut chain = Chain::new(&self.model, rng);
        for _ in 0..self.burnin {
            chain.sweep(rng);
        }
        let mut acc = vec![0.0; n];
        for _ in 0..kept.max(1) {
            chain.sweep(rng);
            for (a, f) in acc.iter_mut().zip(&chain.field) {
                *a += f.tanh();
            }
        }
        let k = kept.max(1) as f64;
        MeanVector { values: acc.into_iter().map(|a| a / k).collect(), exact: false }
    }

    /// Attaches an estimated mean so that [`VectorSource::mean_vector`] is available.
    pub fn with_estimated_mean(mut self, kept: usize, rng: &mut dyn RngCore) -> Self {
        self.mean = Some(self.estimate_mean(kept, rng));
        self
    }
}

impl VectorSource for SkGibbsSource {
    fn dim(&self) -> usize {
        self.model.n
    }

    fn sample_into(&self, rng: &mut dyn RngCore, out: &mut [f64]) {
        let mut chain = Chain::new(&self.model, rng);
        for _ in 0..self.burnin {
            chain.sweep(rng);
        }
        out.copy_from_slice(&chain.state);
    }

    fn sample_batch(&self, count: usize, rng: &mut dyn RngCore) -> Vec<Vec<f64>> {
        let mut chain = Chain::new(&self.model, rng);
        for _ in 0..self.burnin {
            chain.sweep(rng);
        }
        let mut out = Vec::with_capacity(count);
        for t in 0..count {
            if t > 0 {
                for _ in 0..self.thin {
                    chain.sweep(rng);
                }
            }
            out.push(chain.state.clone());
        }
        out
    }

    fn mean_vector(&self) -> Option<MeanVector> {
        self.mean.clone()
    }

    /// `ρ = 1`; `q` from the replica-symmetric fixed point.
    fn targets(&self) -> Option<Targets> {
        sk_fixed_point(self.model.beta, self.model.h).ok().map(|q| Targets { rho: 1.0, q })
    }

    fn describe(&self) -> String {
        format!("sk-gibbs(N={}, beta={}, h={}, seed={})", self.model.n, self.model.beta, self.model.h, self.model.seed)
    }
}

pub const FIXED_POINT_DAMPING: f64 = 0.5;
pub const FIXED_POINT_TOL: f64 = 1e-12;
pub const FIXED_POINT_MAX_ITER: usize = 10_000;

/// Solves `q = E tanh²(β√q z + h)` by damped iteration with 64-node
/// Gauss–Hermite quadrature, starting from `tanh² h`.
pub fn sk_fixed_point(beta: f64, h: f64) -> Result<f64> {
    precondition(beta >= 0.0, || format!("beta must be >= 0, got {beta}"))?;
    let gh = GaussHermite::new(64);
    let map = |q: f64| gh.gaussian_expectation(|z| (beta * q.sqrt() * z + h).tanh().powi(2));
    let mut q = h.tanh().powi(2);
    for _ in 0..FIXED_POINT_MAX_ITER {
        let next = (1.0 - FIXED_POINT_DAMPING) * q + FIXED_POINT_DAMPING * map(q);
        if (next - q).abs() < FIXED_POINT_TOL {
            return Ok(next);
        }
        q = next;
    }
    Err(Error::NonConvergence(FIXED_POINT_MAX_ITER))
}

/// `q − E tanh²(β√q z + h)` evaluated by composite Simpson quadrature on
/// `[−12, 12]`, independent of the Gauss–Hermite rule used by the solver.
pub fn fixed_point_residual(beta: f64, h: f64, q: f64) -> f64 {
    let (a, b, m) = (-12.0f64, 12.0f64, 4_000usize);
    let step = (b - a) / m as f64;
    let f = |z: f64| (beta * q.sqrt() * z + h).tanh().powi(2) * (-0.5 * z * z).exp();
    let mut s = f(a) + f(b);
    for i in 1..m {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * step);
    }
    q - s * step / 3.0 / (2.0 * std::f64::consts::PI).sqrt()
}

/// Default source parameters for high-temperature experiments.
pub fn default_gibbs(model: Arc<SkModel>) -> SkGibbsSource {
    sk_glauber(model, DEFAULT_BURNIN, DEFAULT_THIN).expect("defaults are valid")
}

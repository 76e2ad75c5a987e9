//! Gaussian projection directions `Θ ∈ R^{N×k}` and the three reference laws
//! on `(R^k)^{2p}`:
//!
//! * `P_N` — `(Θᵀx¹, …, Θᵀx^{2p})` with replicas `xℓ` of the source;
//! * `Q_N` — `Θᵀ⟨x⟩ + √(ρ−q) ξℓ`, a common random shift plus iid noise;
//! * `Q`   — `√q z + √(ρ−q) ξℓ`, i.e. `N(0, R^{2p}_{ρ,q} ⊗ I_k)`.
//!
//! Flattened samples are indexed `ℓ·k + j`, matching
//! [`KronCovariance`](crate::rs_algebra::KronCovariance).

use std::io::Write;
use std::path::Path;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::rs_algebra::{sigma_sqrt, KronCovariance};
use crate::sources::VectorSource;

/// `N × k` matrix stored row-major: entry `(i, j)` at `i·k + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionDirections {
    n: usize,
    k: usize,
    entries: Vec<f64>,
}

impl ProjectionDirections {
    pub fn from_entries(n: usize, k: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != n * k {
            return Err(Error::LengthMismatch(entries.len(), n * k));
        }
        Ok(Self { n, k, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.k + j]
    }
    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    /// `Θᵀx`.
    pub fn project(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch(x.len(), self.n));
        }
        let mut out = vec![0.0; self.k];
        self.project_into(x, &mut out);
        Ok(out)
    }

    fn project_into(&self, x: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (row, xi) in self.entries.chunks_exact(self.k).zip(x) {
            for (o, t) in out.iter_mut().zip(row) {
                *o += t * xi;
            }
        }
    }

    /// `ΘᵀΘ`, row-major `k × k`.
    pub fn gram(&self) -> Vec<f64> {
        let k = self.k;
        let mut g = vec![0.0; k * k];
        for row in self.entries.chunks_exact(k) {
            for a in 0..k {
                for b in 0..k {
                    g[a * k + b] += row[a] * row[b];
                }
            }
        }
        g
    }
}

/// `Θ` with iid `N(0, 1/N)` entries.
pub fn sample_directions(n: usize, k: usize, rng: &mut dyn RngCore) -> Result<ProjectionDirections> {
    precondition(k >= 1 && k < n, || format!("need 1 <= k < N, got N={n}, k={k}"))?;
    let scale = 1.0 / (n as f64).sqrt();
    let entries = (0..n * k).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(ProjectionDirections { n, k, entries })
}

/// `2p` vectors in `R^k`, one per replica.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicatedProjectionSample {
    pub p: usize,
    pub k: usize,
    pub values: Vec<Vec<f64>>,
}

impl ReplicatedProjectionSample {
    pub fn flatten(&self) -> Vec<f64> {
        self.values.concat()
    }
}

/// Whether `sample_pn` draws a new `Θ` or conditions on a given one.
#[derive(Debug, Clone, Copy)]
pub enum ThetaMode<'a> {
    Fresh,
    Fixed(&'a ProjectionDirections),
}

/// One draw from `P_N`: a single `Θ` applied to `2p` independent replicas.
pub fn sample_pn(
    source: &dyn VectorSource,
    p: usize,
    k: usize,
    rng: &mut dyn RngCore,
    theta_mode: ThetaMode<'_>,
) -> Result<ReplicatedProjectionSample> {
    precondition(p >= 1, || "p must be >= 1".into())?;
    let fresh;
    let theta = match theta_mode {
        ThetaMode::Fresh => {
            fresh = sample_directions(source.dim(), k, rng)?;
            &fresh
        }
        ThetaMode::Fixed(theta) => {
            precondition(theta.k == k && theta.n == source.dim(), || {
                format!("fixed Θ is {}×{}, expected {}×{k}", theta.n, theta.k, source.dim())
            })?;
            theta
        }
    };
    let mut x = vec![0.0; source.dim()];
    let values = (0..2 * p)
        .map(|_| {
            source.sample_into(rng, &mut x);
            let mut v = vec![0.0; k];
            theta.project_into(&x, &mut v);
            v
        })
        .collect();
    Ok(ReplicatedProjectionSample { p, k, values })
}

fn check_targets(rho: f64, q: f64) -> Result<()> {
    precondition(q >= 0.0 && q < rho, || format!("need 0 <= q < rho, got rho={rho}, q={q}"))
}

/// One draw from `Q_N`: fresh `Θ`, then `Θᵀμ + √(ρ−q) ξℓ`.
pub fn sample_qn(
    mean_vec: &[f64],
    rho: f64,
    q: f64,
    p: usize,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<ReplicatedProjectionSample> {
    check_targets(rho, q)?;
    let theta = sample_directions(mean_vec.len(), k, rng)?;
    sample_qn_given(&theta, mean_vec, rho, q, p, rng)
}

/// `Q_N` conditional on `Θ`.
pub fn sample_qn_given(
    theta: &ProjectionDirections,
    mean_vec: &[f64],
    rho: f64,
    q: f64,
    p: usize,
    rng: &mut dyn RngCore,
) -> Result<ReplicatedProjectionSample> {
    check_targets(rho, q)?;
    let shift = theta.project(mean_vec)?;
    Ok(shared_shift_sample(&shift, rho - q, p, rng))
}

/// One draw from `Q = N(0, R^{2p}_{ρ,q} ⊗ I_k)` as `√q z + √(ρ−q) ξℓ`.
pub fn sample_q(rho: f64, q: f64, p: usize, k: usize, rng: &mut dyn RngCore) -> Result<ReplicatedProjectionSample> {
    check_targets(rho, q)?;
    let sq = q.sqrt();
    let shift: Vec<f64> = (0..k).map(|_| sq * rng.sample::<f64, _>(StandardNormal)).collect();
    Ok(shared_shift_sample(&shift, rho - q, p, rng))
}

fn shared_shift_sample(shift: &[f64], var: f64, p: usize, rng: &mut dyn RngCore) -> ReplicatedProjectionSample {
    let s = var.sqrt();
    let values = (0..2 * p)
        .map(|_| shift.iter().map(|m| m + s * rng.sample::<f64, _>(StandardNormal)).collect())
        .collect();
    ReplicatedProjectionSample { p, k: shift.len(), values }
}

/// Samples `Q` as `Σ^{1/2} w` with `w` standard normal; same law as
/// [`sample_q`], used to cross-check the shared-shift construction.
pub struct SigmaSqrtSampler {
    p: usize,
    k: usize,
    root: nalgebra::DMatrix<f64>,
}

impl SigmaSqrtSampler {
    pub fn new(rho: f64, q: f64, p: usize, k: usize) -> Result<Self> {
        check_targets(rho, q)?;
        let root = sigma_sqrt(&KronCovariance::replicated(p, k, rho, q))?;
        Ok(Self { p, k, root })
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> ReplicatedProjectionSample {
        let d = self.root.nrows();
        let w = nalgebra::DVector::from_fn(d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y = &self.root * w;
        let values = y.as_slice().chunks_exact(self.k).map(<[f64]>::to_vec).collect();
        ReplicatedProjectionSample { p: self.p, k: self.k, values }
    }
}

/// Formats a float with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// CSV with header `replica,coord_1,…,coord_k`, one row per replica; `replica`
/// is the 1-based index within its draw.
pub fn write_samples_csv<W: Write>(mut w: W, samples: &[ReplicatedProjectionSample]) -> Result<()> {
    let k = samples.first().map_or(0, |s| s.k);
    let mut header = String::from("replica");
    for j in 1..=k {
        header.push_str(&format!(",coord_{j}"));
    }
    writeln!(w, "{header}")?;
    for s in samples {
        if s.k != k {
            return Err(Error::LengthMismatch(s.k, k));
        }
        for (l, v) in s.values.iter().enumerate() {
            let mut line = (l + 1).to_string();
            for x in v {
                line.push(',');
                line.push_str(&fmt_f64(*x));
            }
            writeln!(w, "{line}")?;
        }
    }
    Ok(())
}

/// Shape and provenance of a raw matrix file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSidecar {
    pub rows: usize,
    pub cols: usize,
    pub dtype: String,
    pub order: String,
    pub seed: u64,
}

/// Writes `rows` as a little-endian f64 matrix at `path` and a JSON sidecar at
/// `path` + `.json`.
pub fn write_raw_matrix(path: &Path, rows: &[Vec<f64>], seed: u64) -> Result<RawSidecar> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut bytes = Vec::with_capacity(rows.len() * cols * 8);
    for r in rows {
        if r.len() != cols {
            return Err(Error::LengthMismatch(r.len(), cols));
        }
        for x in r {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    std::fs::write(path, bytes)?;
    let sidecar = RawSidecar { rows: rows.len(), cols, dtype: "f64-le".into(), order: "row-major".into(), seed };
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    std::fs::write(side, serde_json::to_string_pretty(&sidecar)?)?;
    Ok(sidecar)
}

pub fn read_raw_matrix(path: &Path) -> Result<(Vec<Vec<f64>>, RawSidecar)> {
    let mut side = path.as_os_str().to_owned();
    side.push(".json");
    let sidecar: RawSidecar = serde_json::from_str(&std::fs::read_to_string(side)?)?;
    let bytes = std::fs::read(path)?;
    if bytes.len() != sidecar.rows * sidecar.cols * 8 {
        return Err(Error::Format(format!("raw file has {} bytes, sidecar says {}×{}", bytes.len(), sidecar.rows, sidecar.cols)));
    }
    let flat: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    let rows = if sidecar.cols == 0 { vec![Vec::new(); sidecar.rows] } else { flat.chunks(sidecar.cols).map(<[f64]>::to_vec).collect() };
    Ok((rows, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rs_algebra::rs_build;
    use crate::seed::LabRng;
    use crate::sources::{isotropic_gaussian, point_mass, spiked_gaussian};
    use crate::stats::jackknife_mean;
    use rand::SeedableRng;

    /// Checks every entry of the empirical second-moment matrix of centered
    /// flattened draws against `target` at 4 SE.
    fn assert_covariance(draws: &[Vec<f64>], target: &nalgebra::DMatrix<f64>) {
        let d = target.nrows();
        for a in 0..d {
            for b in a..d {
                let prods: Vec<f64> = draws.iter().map(|x| x[a] * x[b]).collect();
                let est = jackknife_mean(&prods);
                assert!(est.z_score(target[(a, b)]).abs() < 4.0, "({a},{b}): {est:?} vs {}", target[(a, b)]);
            }
        }
    }

    #[test]
    fn directions_have_unit_columns_and_are_reproducible() {
        let mut rng = LabRng::seed_from_u64(3);
        let mut norms = Vec::new();
        let mut cross = Vec::new();
        for _ in 0..2_000 {
            let t = sample_directions(1000, 3, &mut rng).unwrap();
            let g = t.gram();
            norms.push(g[0]);
            cross.push(g[1]);
        }
        assert!(jackknife_mean(&norms).z_score(1.0).abs() < 4.0);
        assert!(jackknife_mean(&cross).z_score(0.0).abs() < 4.0);
        let a = sample_directions(50, 2, &mut LabRng::seed_from_u64(9)).unwrap();
        let b = sample_directions(50, 2, &mut LabRng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
        assert!(sample_directions(3, 3, &mut rng).is_err());
        assert!(sample_directions(3, 0, &mut rng).is_err());
    }

    #[test]
    fn project_examples() {
        let mut rng = LabRng::seed_from_u64(1);
        let t = sample_directions(30, 4, &mut rng).unwrap();
        assert_eq!(t.project(&[0.0; 30]).unwrap(), vec![0.0; 4]);
        assert!(t.project(&[0.0; 29]).is_err());

        let mut e1 = vec![0.0; 5];
        e1[0] = 1.0;
        let unit = ProjectionDirections::from_entries(5, 1, e1).unwrap();
        assert_eq!(unit.project(&[5.0, 1.0, 2.0, 3.0, 4.0]).unwrap(), vec![5.0]);

        let x: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        let fast = t.project(&x).unwrap();
        for j in 0..4 {
            let mut naive = 0.0;
            for i in 0..30 {
                naive += t.get(i, j) * x[i];
            }
            assert!((naive - fast[j]).abs() < 1e-12);
        }
    }

    #[test]
    fn pn_point_mass_replicas_coincide() {
        let mu: Vec<f64> = (0..40).map(|i| 1.0 + i as f64 / 40.0).collect();
        let src = point_mass(mu.clone());
        let mut rng = LabRng::seed_from_u64(5);
        let s = sample_pn(&src, 1, 3, &mut rng, ThetaMode::Fresh).unwrap();
        assert_eq!(s.values[0], s.values[1]);

        let theta = sample_directions(40, 3, &mut rng).unwrap();
        let s = sample_pn(&src, 2, 3, &mut rng, ThetaMode::Fixed(&theta)).unwrap();
        assert_eq!(s.values[0], theta.project(&mu).unwrap());
        assert_eq!(s.flatten().len(), 12);
    }

    #[test]
    fn pn_isotropic_covariance_is_identity_blocks() {
        let src = isotropic_gaussian(40);
        let mut rng = LabRng::seed_from_u64(17);
        let draws: Vec<Vec<f64>> =
            (0..20_000).map(|_| sample_pn(&src, 1, 2, &mut rng, ThetaMode::Fresh).unwrap().flatten()).collect();
        assert_covariance(&draws, &KronCovariance::replicated(1, 2, 1.0, 0.0).densify());
    }

    #[test]
    fn pn_conditional_law_under_fixed_theta() {
        // N(μ, (ρ−q) I): Θᵀx | Θ ~ N(Θᵀμ, (ρ−q) ΘᵀΘ)
        let n = 200;
        let mu: Vec<f64> = (0..n).map(|i| ((i % 7) as f64 - 3.0) / 3.0).collect();
        let src = spiked_gaussian(vec![0.5; n], mu.clone()).unwrap();
        let mut rng = LabRng::seed_from_u64(2);
        let theta = sample_directions(n, 2, &mut rng).unwrap();
        let m = theta.project(&mu).unwrap();
        let g = theta.gram();
        let draws: Vec<Vec<f64>> = (0..20_000)
            .map(|_| {
                let s = sample_pn(&src, 1, 2, &mut rng, ThetaMode::Fixed(&theta)).unwrap();
                vec![s.values[0][0] - m[0], s.values[0][1] - m[1]]
            })
            .collect();
        let target = nalgebra::DMatrix::from_row_slice(2, 2, &g).scale(0.5);
        assert_covariance(&draws, &target);
    }

    #[test]
    fn qn_examples() {
        let mut rng = LabRng::seed_from_u64(8);
        assert!(sample_qn(&[0.0; 10], 1.0, 1.0, 1, 2, &mut rng).is_err());

        let zero: Vec<Vec<f64>> =
            (0..20_000).map(|_| sample_qn(&[0.0; 30], 2.0, 0.5, 1, 2, &mut rng).unwrap().flatten()).collect();
        assert_covariance(&zero, &KronCovariance::replicated(1, 2, 1.5, 0.0).densify());

        let n = 64;
        let mean = vec![0.5f64; n]; // ‖μ‖²/N = 0.25
        let draws: Vec<Vec<f64>> =
            (0..20_000).map(|_| sample_qn(&mean, 1.0, 0.25, 2, 1, &mut rng).unwrap().flatten()).collect();
        assert_covariance(&draws, &rs_build(4, 1.0, 0.25).densify());

        let diffs: Vec<f64> = draws.iter().map(|x| (x[0] - x[1]).powi(2)).collect();
        assert!(jackknife_mean(&diffs).z_score(2.0 * 0.75).abs() < 4.0);
    }

    #[test]
    fn q_constructions_agree() {
        let mut rng = LabRng::seed_from_u64(10);
        let target = KronCovariance::replicated(2, 2, 1.0, 0.3).densify();
        let shared: Vec<Vec<f64>> =
            (0..20_000).map(|_| sample_q(1.0, 0.3, 2, 2, &mut rng).unwrap().flatten()).collect();
        assert_covariance(&shared, &target);
        let sampler = SigmaSqrtSampler::new(1.0, 0.3, 2, 2).unwrap();
        let rooted: Vec<Vec<f64>> = (0..20_000).map(|_| sampler.sample(&mut rng).flatten()).collect();
        assert_covariance(&rooted, &target);

        let iid: Vec<Vec<f64>> = (0..20_000).map(|_| sample_q(2.0, 0.0, 1, 1, &mut rng).unwrap().flatten()).collect();
        assert_covariance(&iid, &KronCovariance::replicated(1, 1, 2.0, 0.0).densify());
    }

    #[test]
    fn csv_and_raw_formats() {
        let s = ReplicatedProjectionSample { p: 1, k: 2, values: vec![vec![0.1, -2.0], vec![1.0 / 3.0, 0.0]] };
        let mut buf = Vec::new();
        write_samples_csv(&mut buf, std::slice::from_ref(&s)).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "replica,coord_1,coord_2");
        assert_eq!(lines.len(), 3);
        let third: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(third, 1.0 / 3.0);

        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.bin");
        let side = write_raw_matrix(&path, &s.values, 42).unwrap();
        assert_eq!((side.rows, side.cols, side.seed), (2, 2, 42));
        let (back, side2) = read_raw_matrix(&path).unwrap();
        assert_eq!(back, s.values);
        assert_eq!(side, side2);
    }
}

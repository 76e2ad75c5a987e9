//! Closed-form algebra for replica-symmetric matrices.
//!
//! `R^m_{ρ,q}` has every diagonal entry equal to `ρ` and every off-diagonal
//! entry equal to `q`, i.e. `R = (ρ − q) I + q 11ᵀ`. Its spectrum is
//! `ρ + (m−1)q` on the all-ones direction and `ρ − q` on the orthogonal
//! complement, so inverses, square roots and operator norms are all available
//! in closed form. Matrices are kept in parametric form and only densified on
//! request.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The `m × m` replica-symmetric matrix with diagonal `rho` and off-diagonal `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsMatrix {
    pub m: usize,
    pub rho: f64,
    pub q: f64,
}

/// Two-point spectrum of an [`RsMatrix`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsSpectrum {
    /// Eigenvalue on `1/√m · (1, …, 1)`, multiplicity one.
    pub top: f64,
    /// Eigenvalue on the complement of the all-ones direction.
    pub rest: f64,
    /// Multiplicity of `rest`, i.e. `m − 1`.
    pub rest_multiplicity: usize,
}

/// Builds `R^m_{rho,q}`. Panics if `m == 0`.
pub fn rs_build(m: usize, rho: f64, q: f64) -> RsMatrix {
    assert!(m >= 1, "replica-symmetric matrix needs order >= 1");
    RsMatrix { m, rho, q }
}

impl RsMatrix {
    pub fn densify(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.m, self.m, |i, j| if i == j { self.rho } else { self.q })
    }

    pub fn eigvals(&self) -> RsSpectrum {
        RsSpectrum {
            top: self.rho + (self.m as f64 - 1.0) * self.q,
            rest: self.rho - self.q,
            rest_multiplicity: self.m - 1,
        }
    }

    /// Positive definite iff both distinct eigenvalues are positive. For `m = 1`
    /// only the diagonal matters.
    pub fn is_positive_definite(&self) -> bool {
        let s = self.eigvals();
        s.top > 0.0 && (self.m == 1 || s.rest > 0.0)
    }

    fn require_pd(&self) -> Result<RsSpectrum> {
        if self.is_positive_definite() {
            Ok(self.eigvals())
        } else {
            Err(Error::SingularMatrix { m: self.m, rho: self.rho, q: self.q })
        }
    }

    /// Inverse, again replica-symmetric.
    ///
    /// For `q > 0` this is the Sherman–Morrison form `a = 1/(ρ−q) − 1/(c(ρ−q)²)`,
    /// `b = −1/(c(ρ−q)²)` with `c = 1/q + m/(ρ−q)`. That expression has a
    /// removable singularity at `q = 0` and is not defined for `q < 0`, so
    /// those cases go through the equivalent rank-one form
    /// `b = −q/((ρ−q)(ρ+(m−1)q))`, `a = 1/(ρ−q) + b`.
    pub fn inverse(&self) -> Result<RsMatrix> {
        self.require_pd()?;
        let (m, rho, q) = (self.m, self.rho, self.q);
        if m == 1 {
            return Ok(RsMatrix { m, rho: 1.0 / rho, q: 0.0 });
        }
        let gap = rho - q;
        if q == 0.0 {
            return Ok(RsMatrix { m, rho: 1.0 / rho, q: 0.0 });
        }
        if q > 0.0 {
            let c = 1.0 / q + m as f64 / gap;
            let b = -1.0 / (c * gap * gap);
            return Ok(RsMatrix { m, rho: 1.0 / gap + b, q: b });
        }
        let top = rho + (m as f64 - 1.0) * q;
        let b = -q / (gap * top);
        Ok(RsMatrix { m, rho: 1.0 / gap + b, q: b })
    }
}

/// `Σ = R^{m}_{ρ,q} ⊗ I_k`, laid out with replica blocks of size `k`:
/// entry `(ℓk + j, ℓ'k + j')` is `δ_{jj'}·(ρ if ℓ = ℓ' else q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KronCovariance {
    pub base: RsMatrix,
    pub k: usize,
}

impl KronCovariance {
    pub fn new(base: RsMatrix, k: usize) -> Self {
        assert!(k >= 1);
        Self { base, k }
    }

    /// Covariance of `2p` replicated `k`-dimensional projections.
    pub fn replicated(p: usize, k: usize, rho: f64, q: f64) -> Self {
        Self::new(rs_build(2 * p, rho, q), k)
    }

    pub fn order(&self) -> usize {
        self.base.m * self.k
    }

    pub fn densify(&self) -> DMatrix<f64> {
        self.spectral_function(|x| x).expect("densify of parametric matrix")
    }

    /// Applies `f` to both eigenvalues of the base and Kronecker-extends:
    /// `f(rest)·I + (f(top) − f(rest))/m · (11ᵀ ⊗ I_k)`.
    fn spectral_function(&self, f: impl Fn(f64) -> f64) -> Result<DMatrix<f64>> {
        let s = self.base.eigvals();
        let (m, k) = (self.base.m, self.k);
        let f_top = f(s.top);
        let f_rest = if m == 1 { f_top } else { f(s.rest) };
        let shared = (f_top - f_rest) / m as f64;
        Ok(DMatrix::from_fn(m * k, m * k, |r, c| {
            if r % k != c % k {
                0.0
            } else if r == c {
                f_rest + shared
            } else {
                shared
            }
        }))
    }

    /// Symmetric positive-definite square root.
    pub fn sqrt(&self) -> Result<DMatrix<f64>> {
        self.base.require_pd()?;
        self.spectral_function(f64::sqrt)
    }

    /// Symmetric inverse square root.
    pub fn inv_sqrt(&self) -> Result<DMatrix<f64>> {
        self.base.require_pd()?;
        self.spectral_function(|x| 1.0 / x.sqrt())
    }

    /// `‖Σ^{-1/2}‖_op` from the two-point spectrum.
    pub fn inv_sqrt_opnorm(&self) -> Result<f64> {
        let s = self.base.require_pd()?;
        let smallest = if self.base.m == 1 { s.top } else { s.top.min(s.rest) };
        Ok(1.0 / smallest.sqrt())
    }
}

/// Closed-form square root of `R^{2p}_{ρ,q} ⊗ I_k` (order `2pk`).
pub fn sigma_sqrt(cov: &KronCovariance) -> Result<DMatrix<f64>> {
    cov.sqrt()
}

/// `‖Σ^{-1/2}‖_op = 1/√(ρ − q)` for `0 ≤ q < ρ`, whatever `p` and `k`.
pub fn sigma_inv_sqrt_opnorm(rho: f64, q: f64) -> Result<f64> {
    if !(q >= 0.0 && q < rho) {
        return Err(Error::Domain(format!("need 0 <= q < rho, got rho={rho}, q={q}")));
    }
    Ok(1.0 / (rho - q).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).abs().max()
    }

    fn sorted_eigs(m: &DMatrix<f64>) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
        e.sort_by(f64::total_cmp);
        e
    }

    #[test]
    fn build_examples() {
        let d = rs_build(3, 2.0, 1.0).densify();
        assert_eq!(d, DMatrix::from_row_slice(3, 3, &[2., 1., 1., 1., 2., 1., 1., 1., 2.]));
        assert_eq!(rs_build(1, 5.0, 9.0).densify(), DMatrix::from_element(1, 1, 5.0));
        assert_eq!(rs_build(2, 1.0, 0.0).densify(), DMatrix::identity(2, 2));
    }

    #[test]
    fn eigval_examples() {
        let s = rs_build(4, 1.0, 0.5).eigvals();
        assert_eq!((s.top, s.rest, s.rest_multiplicity), (2.5, 0.5, 3));
        let s = rs_build(2, 1.0, 0.0).eigvals();
        assert_eq!((s.top, s.rest), (1.0, 1.0));
        let r = rs_build(6, 2.0, -0.1);
        let s = r.eigvals();
        assert!((s.top - 1.5).abs() < 1e-15 && (s.rest - 2.1).abs() < 1e-15);
        let e = sorted_eigs(&r.densify());
        assert!((e[0] - 1.5).abs() < 1e-12);
        for v in &e[1..] {
            assert!((v - 2.1).abs() < 1e-12);
        }
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(rs_build(2, 1.0, 0.0).inverse().unwrap(), rs_build(2, 1.0, 0.0));
        // hand inversion of [[2,1],[1,2]]: det 3
        let inv = rs_build(2, 2.0, 1.0).inverse().unwrap().densify();
        let expect = DMatrix::from_row_slice(2, 2, &[2. / 3., -1. / 3., -1. / 3., 2. / 3.]);
        assert!(max_abs_diff(&inv, &expect) < 1e-15);
        let r = rs_build(4, 1.0, 0.5);
        let prod = r.densify() * r.inverse().unwrap().densify();
        assert!(max_abs_diff(&prod, &DMatrix::identity(4, 4)) < 1e-12);
        let dense_inv = r.densify().try_inverse().unwrap();
        assert!(max_abs_diff(&dense_inv, &r.inverse().unwrap().densify()) < 1e-12);
    }

    #[test]
    fn inverse_rejects_singular() {
        assert!(matches!(rs_build(3, 1.0, 1.0).inverse(), Err(Error::SingularMatrix { .. })));
        // rho + (m-1) q = 0
        assert!(rs_build(3, 1.0, -0.5).inverse().is_err());
        assert!(rs_build(1, -1.0, 0.0).inverse().is_err());
    }

    #[test]
    fn negative_overlap_routes_through_rank_one_form() {
        let r = rs_build(5, 1.0, -0.2);
        let prod = r.densify() * r.inverse().unwrap().densify();
        assert!(max_abs_diff(&prod, &DMatrix::identity(5, 5)) < 1e-12);
    }

    #[test]
    fn sigma_sqrt_examples() {
        let a = sigma_sqrt(&KronCovariance::new(rs_build(2, 1.0, 0.0), 1)).unwrap();
        assert!(max_abs_diff(&a, &DMatrix::identity(2, 2)) < 1e-15);

        let cov = KronCovariance::new(rs_build(2, 1.0, 0.5), 1);
        let a = sigma_sqrt(&cov).unwrap();
        assert!(max_abs_diff(&(&a * &a), &cov.densify()) < 1e-12);
        // oracle: numeric root through the eigendecomposition
        let eig = SymmetricEigen::new(cov.densify());
        let root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt))
            * eig.eigenvectors.transpose();
        assert!(max_abs_diff(&root, &a) < 1e-12);

        let cov = KronCovariance::new(rs_build(4, 1.0, 0.25), 2);
        let a = sigma_sqrt(&cov).unwrap();
        assert_eq!(a.nrows(), 8);
        assert!(max_abs_diff(&(&a * &a), &cov.densify()) < 1e-10);
        assert!(max_abs_diff(&a, &a.transpose()) == 0.0);
    }

    #[test]
    fn kron_layout() {
        let d = KronCovariance::replicated(1, 2, 3.0, 1.0).densify();
        let expect = DMatrix::from_row_slice(
            4,
            4,
            &[3., 0., 1., 0., 0., 3., 0., 1., 1., 0., 3., 0., 0., 1., 0., 3.],
        );
        assert_eq!(d, expect);
    }

    #[test]
    fn opnorm_examples() {
        assert_eq!(sigma_inv_sqrt_opnorm(1.0, 0.75).unwrap(), 2.0);
        assert_eq!(sigma_inv_sqrt_opnorm(1.0, 0.0).unwrap(), 1.0);
        assert!(matches!(sigma_inv_sqrt_opnorm(1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(sigma_inv_sqrt_opnorm(1.0, -0.1), Err(Error::Domain(_))));
        // p = 2, k = 3, (rho, q) = (2, 1): largest singular value of the numeric
        // inverse root equals 1
        let cov = KronCovariance::replicated(2, 3, 2.0, 1.0);
        let eig = SymmetricEigen::new(cov.densify());
        let inv_root = &eig.eigenvectors
            * DMatrix::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt()))
            * eig.eigenvectors.transpose();
        let top = inv_root.singular_values().max();
        assert!((top - 1.0).abs() < 1e-10);
    }

    fn pd_params() -> impl Strategy<Value = (usize, f64, f64)> {
        (2usize..=16, 0.2f64..5.0).prop_flat_map(|(m, rho)| {
            // q ranges over (−ρ/(m−1), ρ) with a margin on both ends
            let lo = -rho / (m as f64 - 1.0) * 0.9;
            let hi = rho * 0.9;
            (Just(m), Just(rho), lo..hi)
        })
    }

    proptest! {
        #[test]
        fn inverse_times_matrix_is_identity((m, rho, q) in pd_params()) {
            let r = rs_build(m, rho, q);
            let prod = r.inverse().unwrap().densify() * r.densify();
            prop_assert!(max_abs_diff(&prod, &DMatrix::identity(m, m)) < 1e-12);
        }

        #[test]
        fn eigvals_match_dense_solver((m, rho, q) in pd_params()) {
            let r = rs_build(m, rho, q);
            let s = r.eigvals();
            let mut expect = vec![s.top];
            expect.extend(std::iter::repeat_n(s.rest, s.rest_multiplicity));
            expect.sort_by(f64::total_cmp);
            let got = sorted_eigs(&r.densify());
            for (a, b) in got.iter().zip(&expect) {
                prop_assert!((a - b).abs() < 1e-12);
            }
        }

        #[test]
        fn double_inverse_round_trips((m, rho, q) in pd_params()) {
            let r = rs_build(m, rho, q);
            let back = r.inverse().unwrap().inverse().unwrap();
            prop_assert!((back.rho - rho).abs() < 1e-10);
            prop_assert!((back.q - q).abs() < 1e-10);
        }

        #[test]
        fn opnorm_matches_numeric(p in 1usize..=3, k in 1usize..=3, rho in 0.3f64..4.0, frac in 0.0f64..0.9) {
            let q = rho * frac;
            let cov = KronCovariance::replicated(p, k, rho, q);
            let top = cov.inv_sqrt().unwrap().singular_values().max();
            prop_assert!((top - sigma_inv_sqrt_opnorm(rho, q).unwrap()).abs() < 1e-10);
            prop_assert!((cov.inv_sqrt_opnorm().unwrap() - top).abs() < 1e-10);
        }
    }
}

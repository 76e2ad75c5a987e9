//! Replica-symmetric matrices `R = (ρ−q)I + q11ᵀ`: two-point spectrum,
//! closed-form inverse, and the Kronecker covariance `R^{2p} ⊗ I_k` of the
//! replicated Gaussian reference law.
//!
//!     cargo run --example rs_algebra

use projlab::rs_algebra::{rs_build, sigma_inv_sqrt_opnorm, KronCovariance};

fn main() -> projlab::Result<()> {
    let r = rs_build(5, 1.0, 0.25);
    let s = r.eigvals();
    println!("R^5_(1, 1/4): top {} (x1), rest {} (x{})", s.top, s.rest, s.rest_multiplicity);

    let inv = r.inverse()?;
    let err = (inv.densify() * r.densify() - nalgebra::DMatrix::identity(5, 5)).abs().max();
    println!("inverse: diag {:.6}, off-diag {:.6}, |R^-1 R - I| = {err:.1e}", inv.rho, inv.q);

    // Negative overlaps are fine as long as ρ + (m−1)q > 0.
    let neg = rs_build(4, 1.0, -0.3);
    println!("q = -0.3, m = 4: positive definite = {}", neg.is_positive_definite());
    println!("q = -0.4, m = 4: positive definite = {}", rs_build(4, 1.0, -0.4).is_positive_definite());

    for (p, k) in [(1, 1), (2, 3)] {
        let cov = KronCovariance::replicated(p, k, 1.0, 0.25);
        let numeric = cov.inv_sqrt()?.singular_values().max();
        println!(
            "p={p}, k={k}: order {}, |Sigma^-1/2| numeric {numeric:.12}, closed form {:.12}",
            cov.order(),
            sigma_inv_sqrt_opnorm(1.0, 0.25)?
        );
    }
    Ok(())
}

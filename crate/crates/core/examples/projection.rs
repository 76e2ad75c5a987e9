//! Replicated projections `(Θᵀx¹, …, Θᵀx^{2p})` of a product source next to
//! draws from the Gaussian reference `N(0, R^{2p}_{ρ,q} ⊗ I_k)`, written as CSV.
//!
//!     cargo run --example projection > samples.csv

use projlab::projection::{sample_pn, sample_q, write_samples_csv, ThetaMode};
use projlab::seed::rng_at;
use projlab::sources::{subgaussian_product, SubGaussianBase};

fn main() -> projlab::Result<()> {
    let (p, k) = (2, 2);
    let source = subgaussian_product(500, 1.0, 0.25, SubGaussianBase::UniformShifted)?;
    let mut rng = rng_at(5, &[("projection-example", 0)]);

    let pn: Vec<_> = (0..3).map(|_| sample_pn(&source, p, k, &mut rng, ThetaMode::Fresh)).collect::<Result<_, _>>()?;
    let q: Vec<_> = (0..3).map(|_| sample_q(1.0, 0.25, p, k, &mut rng)).collect::<Result<_, _>>()?;

    // Within a draw the replicas share Θ, so their empirical overlap is ≈ q.
    let mut out = std::io::stdout().lock();
    eprintln!("# P_N: three draws of {} replicas in R^{k}", 2 * p);
    write_samples_csv(&mut out, &pn)?;
    eprintln!("# Q: three draws");
    write_samples_csv(&mut out, &q)?;
    Ok(())
}

//! One disorder sample of the Sherrington–Kirkpatrick model: heat-bath
//! replicas, the replica-symmetric fixed point, and a binary disorder file.
//!
//!     cargo run --release --example sk_gibbs [N]

use std::sync::Arc;

use projlab::seed::rng_at;
use projlab::sources::sk::fixed_point_residual;
use projlab::sources::{sk_fixed_point, sk_glauber, SkModel, VectorSource};

fn main() -> projlab::Result<()> {
    let n: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200);
    let (beta, h) = (0.3, 0.3);
    let q = sk_fixed_point(beta, h)?;
    println!("fixed point q*({beta}, {h}) = {q:.12}  (residual {:.1e})", fixed_point_residual(beta, h, q));

    let model = Arc::new(SkModel::from_seed(n, beta, h, 42)?);
    let mut rng = rng_at(42, &[("example", 0)]);
    let source = sk_glauber(model.clone(), 200, 10)?.with_estimated_mean(2_000, &mut rng);

    let replicas: Vec<Vec<f64>> = (0..8).map(|_| source.sample(&mut rng)).collect();
    let nf = n as f64;
    for pair in replicas.chunks_exact(2) {
        let overlap = pair[0].iter().zip(&pair[1]).map(|(a, b)| a * b).sum::<f64>() / nf;
        println!("replica overlap {overlap:+.4}   -H/N = {:+.4}", model.neg_hamiltonian(&pair[0]) / nf);
    }
    let m = source.mean_vector().expect("mean attached");
    println!("|<x>|^2/N from the magnetizations: {:.4}  (q* = {q:.4})", m.overlap());

    let path = std::env::temp_dir().join("sk_example.skdz");
    model.write_disorder(&path)?;
    let back = SkModel::read_disorder(&path, beta, h)?;
    println!("disorder file {} round-trips: {}", path.display(), back.couplings() == model.couplings());
    Ok(())
}

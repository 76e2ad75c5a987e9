//! Exact Wasserstein-1 distances between sample clouds, marginals, and the
//! bounded-Lipschitz lower bound from a seeded test-function catalog.
//!
//!     cargo run --release --example metrics

use projlab::metrics::{bl_sup, lipschitz_product_check, marginal, w1_1d, w1_exact_kd, TestCatalog};
use projlab::seed::rng_at;
use rand::Rng;
use rand_distr::StandardNormal;

fn main() -> projlab::Result<()> {
    let mut rng = rng_at(3, &[("metrics-example", 0)]);
    let mut cloud = |shift: f64| -> Vec<Vec<f64>> {
        (0..400).map(|_| (0..3).map(|_| shift + rng.sample::<f64, _>(StandardNormal)).collect()).collect()
    };
    let a = cloud(0.0);
    let b = cloud(0.5);

    let joint = w1_exact_kd(&a, &b)?;
    let first = w1_exact_kd(&marginal(&a, &[0]), &marginal(&b, &[0]))?;
    let line = w1_1d(&a.iter().map(|x| x[0]).collect::<Vec<_>>(), &b.iter().map(|x| x[0]).collect::<Vec<_>>())?;
    println!("W1 joint (R^3) {joint:.4}; shift norm {:.4}", 0.5 * 3f64.sqrt());
    println!("W1 first marginal: assignment {first:.6}, sorted {line:.6}");

    let catalog = TestCatalog::standard(3, 1.0, 1.0, 9)?;
    let bl = bl_sup(&a, &b, &catalog)?;
    println!("BL lower bound over {} test functions: {:.4} (attained by {})", catalog.len(), bl.value, bl.id);

    let mut rng = rng_at(3, &[("lipschitz", 0)]);
    for r in 1..=4 {
        let rep = lipschitz_product_check(&catalog.members[5], r, 10_000, &mut rng)?;
        println!("r={r}: max quotient {:.4} <= r L M^(r-1) = {}", rep.max_quotient, rep.bound);
    }
    Ok(())
}

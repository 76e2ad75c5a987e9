//! Decay of the projection theorem's left-hand side for a product source with
//! shifted Rademacher coordinates (ρ = 1, q = 1/4), over a 16-member catalog.
//!
//!     cargo run --release --example theorem_scaling [inner_replicas]

use projlab::metrics::TestCatalog;
use projlab::sources::{subgaussian_product, SubGaussianBase, VectorSource};
use projlab::verify::{scaling_check, LhsConfig, LhsVariant};

fn main() -> projlab::Result<()> {
    let inner: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8192);
    let catalog = TestCatalog::generate(2, 1.0, 1.0, 16, 2024)?;
    let family = |n: usize| -> projlab::Result<Box<dyn VectorSource>> {
        Ok(Box::new(subgaussian_product(n, 1.0, 0.25, SubGaussianBase::RademacherShifted)?))
    };
    let mut cfg = LhsConfig::new(LhsVariant::Full, 1, 2, 256);
    cfg.inner_replicas = inner;

    let started = std::time::Instant::now();
    let report = scaling_check(&family, &[64, 128, 256, 512, 1024], &catalog, &cfg, 7)?;
    for pt in &report.points {
        println!("N={:5}  sup={:.4e}  se={:.2e}  argmax={}", pt.n, pt.sup.value, pt.sup.se, pt.sup.g);
    }
    println!("slope={:.3}  monotone={}  ({:.1?})", report.slope, report.monotone, started.elapsed());
    Ok(())
}

//! Monte Carlo reproduction of the low-order entry moments of a Haar-distributed
//! orthogonal matrix, and the exchangeable-pair drift of a small random rotation.
//!
//!     cargo run --release --example haar_moments [draws]

use projlab::haar::{drift_check, moment_suite, suite_seed, DriftEstimator};
use projlab::seed::rng_at;

fn main() -> projlab::Result<()> {
    let draws: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(200_000);
    for n in [4, 6, 10] {
        let started = std::time::Instant::now();
        let checks = moment_suite(n, draws, suite_seed(1, n))?;
        println!("n = {n} ({draws} draws, {:.1?})", started.elapsed());
        for c in &checks {
            println!("  {:<32} oracle {:>12.6e}  estimate {:>12.6e}  z {:>6.2}", c.label, c.oracle, c.estimate, c.z);
        }
    }

    for estimator in [DriftEstimator::Plain, DriftEstimator::Antithetic] {
        let report = drift_check(20, 0.02, 200_000, estimator, &mut rng_at(1, &[("drift", 0)]))?;
        println!("drift {estimator:?}: max |z| = {:.2}", report.max_abs_z);
    }
    Ok(())
}

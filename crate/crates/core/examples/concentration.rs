//! Thin-shell and overlap constants `ĉ₁`, `ĉ₂` and the rate functions `d₁`,
//! `d₂` across dimensions, for an isotropic and a single-spike Gaussian.
//! The spike roughly doubles `N·ĉ₂`, but it stays bounded: one direction of
//! size `√N` is not enough to break overlap concentration.
//!
//!     cargo run --release --example concentration

use projlab::seed::rng_at;
use projlab::sources::{isotropic_gaussian, single_spike_gaussian, VectorSource};
use projlab::verify::concentration_report;

fn main() -> projlab::Result<()> {
    println!("{:>14} {:>6} {:>12} {:>12} {:>10} {:>10}", "source", "N", "c1_hat", "c2_hat", "N*c2", "d2");
    for n in [100, 200, 400, 800] {
        let sources: [(&str, Box<dyn VectorSource>); 2] =
            [("isotropic", Box::new(isotropic_gaussian(n))), ("single-spike", Box::new(single_spike_gaussian(n)))];
        for (name, src) in sources {
            let mut rng = rng_at(11, &[("n", n as u64)]);
            let t = src.targets();
            let r = concentration_report(src.as_ref(), 2_000, &mut rng, t.map(|t| t.rho), t.map(|t| t.q))?;
            println!("{name:>14} {n:>6} {:>12.4e} {:>12.4e} {:>10.3} {:>10.3}", r.c1_hat, r.c2_hat, n as f64 * r.c2_hat, r.d2);
        }
    }
    Ok(())
}

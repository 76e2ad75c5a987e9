//! Disorder-averaged SK diagnostics at high temperature: `N·ĉ₂` stays bounded
//! and the cavity field `θᵀx` approaches `√q z + √(1−q) ξ`.
//!
//!     cargo run --release --example sk_cavity [disorders]

use projlab::verify::{sk_cavity, CavityConfig};

fn main() -> projlab::Result<()> {
    let disorders = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(8);
    let cfg = CavityConfig { disorders, ..CavityConfig::default() };
    for n in [64, 128, 256] {
        let r = sk_cavity(n, &cfg, 1)?;
        println!(
            "N={n:4}  q*={:.5}  c1={}  N*c2={:.3} ± {:.3}  W1={:.4} ± {:.4}",
            r.q, r.c1_hat, r.n_c2, r.n_c2_se, r.w1, r.w1_se
        );
    }
    Ok(())
}

//! Seed derivation: every stream is a labelled path under one master seed,
//! so results do not depend on scheduling.
//!
//!     cargo run --example seeds

use projlab::seed::{derive_seed, rng_at};
use rand::Rng;

fn main() {
    let master = 7;
    println!("(a=1, b=2) -> {:#018x}", derive_seed(master, &[("a", 1), ("b", 2)]));
    println!("(b=2, a=1) -> {:#018x}", derive_seed(master, &[("b", 2), ("a", 1)]));
    println!("(outer=0)  -> {:#018x}", derive_seed(master, &[("outer", 0)]));
    let draws: Vec<u32> = (0..4).map(|i| rng_at(master, &[("outer", i)]).random_range(0..100)).collect();
    println!("first draw of outer streams 0..4: {draws:?}");
}

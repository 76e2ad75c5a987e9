//! Randomized invariants across modules.

use projlab::metrics::{w1_1d, w1_exact_kd};
use projlab::projection::{sample_q, SigmaSqrtSampler};
use projlab::rs_algebra::rs_build;
use projlab::seed::{derive_seed, rng_at};
use projlab::verify::lhs::replica_expansion;
use projlab::verify::rates;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn seed_paths_are_order_sensitive(master in any::<u64>(), a in any::<u64>(), b in any::<u64>()) {
        let ab = derive_seed(master, &[("x", a), ("y", b)]);
        prop_assert_eq!(ab, derive_seed(master, &[("x", a), ("y", b)]));
        prop_assert_ne!(ab, derive_seed(master, &[("y", b), ("x", a)]));
        prop_assert_ne!(derive_seed(master, &[("x", a)]), derive_seed(master, &[("x", a), ("x", a)]));
    }

    #[test]
    fn rs_inverse_is_replica_symmetric(m in 2usize..40, rho in 0.1f64..5.0, frac in -0.9f64..0.99) {
        // frac scales q between the two positive-definiteness limits.
        let q = if frac < 0.0 { frac * rho / (m as f64 - 1.0) } else { frac * rho };
        let r = rs_build(m, rho, q);
        let inv = r.inverse().unwrap();
        let s = r.eigvals();
        let t = inv.eigvals();
        prop_assert!((t.top * s.top - 1.0).abs() < 1e-9);
        prop_assert!((t.rest * s.rest - 1.0).abs() < 1e-9);
    }

    #[test]
    fn w1_1d_is_a_metric(a in proptest::collection::vec(-5.0f64..5.0, 12),
                         b in proptest::collection::vec(-5.0f64..5.0, 12),
                         c in proptest::collection::vec(-5.0f64..5.0, 12)) {
        let ab = w1_1d(&a, &b).unwrap();
        prop_assert!((ab - w1_1d(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= w1_1d(&a, &c).unwrap() + w1_1d(&c, &b).unwrap() + 1e-12);
        prop_assert_eq!(w1_1d(&a, &a).unwrap(), 0.0);
        // In one dimension the assignment solver must agree with sorting.
        let col = |v: &[f64]| v.iter().map(|x| vec![*x]).collect::<Vec<_>>();
        prop_assert!((w1_exact_kd(&col(&a), &col(&b)).unwrap() - ab).abs() < 1e-12);
    }

    #[test]
    fn rates_are_monotone(c in 0.0f64..1.0, dc in 0.0f64..1.0, n in 2usize..10_000, rho in 0.1f64..3.0) {
        let lo = rates(c, c, n, rho, rho / 2.0).unwrap();
        let hi = rates(c + dc, c + dc, n, rho, rho / 2.0).unwrap();
        prop_assert!(hi.d1 >= lo.d1 && hi.d2 >= lo.d2);
    }

    #[test]
    fn replica_expansion_is_exact_on_constant_samples(x in -3.0f64..3.0, y in -3.0f64..3.0, shift in -1.0f64..1.0,
                                                       p in 1usize..4, len in 8usize..20) {
        let expected = (x - y).powi(2 * p as i32);
        let got = replica_expansion(&vec![x; len], &vec![y; len], p, shift);
        prop_assert!((got - expected).abs() < 1e-9 * (1.0 + expected), "{} vs {}", got, expected);
    }
}

#[test]
fn two_constructions_of_the_reference_law_agree() {
    // Shared-shift sampling and Σ^{1/2}w must give the same covariance.
    let (rho, q, p, k) = (1.0, 0.4, 2, 2);
    let sampler = SigmaSqrtSampler::new(rho, q, p, k).unwrap();
    let mut rng = rng_at(0, &[("q-law", 0)]);
    let draws = 40_000;
    let d = 2 * p * k;
    let mut cov_a = vec![0.0; d * d];
    let mut cov_b = vec![0.0; d * d];
    for _ in 0..draws {
        let a = sample_q(rho, q, p, k, &mut rng).unwrap().flatten();
        let b = sampler.sample(&mut rng).flatten();
        for i in 0..d {
            for j in 0..d {
                cov_a[i * d + j] += a[i] * a[j] / draws as f64;
                cov_b[i * d + j] += b[i] * b[j] / draws as f64;
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            let expected = if i % k != j % k { 0.0 } else if i == j { rho } else { q };
            assert!((cov_a[i * d + j] - expected).abs() < 0.04, "shared shift ({i},{j})");
            assert!((cov_b[i * d + j] - expected).abs() < 0.04, "sigma root ({i},{j})");
        }
    }
}

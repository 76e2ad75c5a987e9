//! Gauss–Hermite quadrature for expectations over a standard Gaussian.

use std::f64::consts::PI;

/// Nodes and weights for `∫ f(x) e^{−x²} dx ≈ Σ wᵢ f(xᵢ)`.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussHermite {
    /// `n`-point rule via Newton iteration on the normalized Hermite recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        const PIM4: f64 = 0.751_125_544_464_942_5; // π^{-1/4}
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let mut z = 0.0f64;
        for i in 0..n.div_ceil(2) {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-0.16667),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = PIM4;
                let mut p2 = 0.0;
                for j in 1..=n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / jf).sqrt() * p2 - ((jf - 1.0) / jf).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        Self { nodes, weights }
    }

    /// `E f(Z)` for `Z ~ N(0, 1)`.
    pub fn gaussian_expectation(&self, f: impl Fn(f64) -> f64) -> f64 {
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(std::f64::consts::SQRT_2 * x))
            .sum();
        s / PI.sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_root_pi() {
        for n in [1, 2, 5, 20, 64] {
            let gh = GaussHermite::new(n);
            let s: f64 = gh.weights.iter().sum();
            assert!((s - PI.sqrt()).abs() < 1e-13, "n={n}: {s}");
        }
    }

    #[test]
    fn gaussian_moments() {
        let gh = GaussHermite::new(64);
        assert!((gh.gaussian_expectation(|z| z * z) - 1.0).abs() < 1e-13);
        assert!((gh.gaussian_expectation(|z| z.powi(4)) - 3.0).abs() < 1e-12);
        assert!(gh.gaussian_expectation(|z| z.powi(3)).abs() < 1e-13);
        assert!((gh.gaussian_expectation(f64::cos) - (-0.5f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_sorted_descending_and_distinct() {
        let gh = GaussHermite::new(64);
        for w in gh.nodes.windows(2) {
            assert!(w[0] > w[1]);
        }
    }
}

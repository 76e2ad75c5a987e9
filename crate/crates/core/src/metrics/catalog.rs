//! Bounded-Lipschitz test functions `g: R^k → R` with declared `(L, M)`, and
//! seeded finite catalogs of them standing in for the full BL ball.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{precondition, Error, Result};
use crate::seed::LabRng;

/// Pairs sampled by [`TestFunction::validate`].
pub const VALIDATION_PAIRS: usize = 10_000;

const LIP_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum TestKind {
    /// `clamp(x_index, −M, M)`; Lipschitz constant 1.
    Coordinate { index: usize },
    /// `M·tanh(w·x + b)`; Lipschitz constant `M‖w‖`.
    Ridge { w: Vec<f64>, b: f64 },
    /// `g₁·g₂/(2M)` for members with the same `(L, M)`: the product rule gives
    /// Lipschitz constant `2LM`, so the rescaled product stays in the ball.
    Product { left: Box<TestFunction>, right: Box<TestFunction> },
    Constant { value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub id: String,
    pub k: usize,
    pub lip: f64,
    pub sup: f64,
    pub kind: TestKind,
}

impl TestFunction {
    /// Coordinate map clamped to `[−M, M]`; requires `L ≥ 1`.
    pub fn coordinate(k: usize, index: usize, lip: f64, sup: f64) -> Result<Self> {
        precondition(index < k, || format!("coordinate {index} out of range for k={k}"))?;
        precondition(lip >= 1.0, || format!("clamped coordinate has Lipschitz constant 1 > L={lip}"))?;
        Ok(Self { id: format!("coord[{index}]"), k, lip, sup, kind: TestKind::Coordinate { index } })
    }

    /// `M·tanh(w·x + b)`; requires `M‖w‖ ≤ L`.
    pub fn ridge(id: impl Into<String>, w: Vec<f64>, b: f64, lip: f64, sup: f64) -> Result<Self> {
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        precondition(sup * norm <= lip * (1.0 + LIP_SLACK), || format!("ridge has Lipschitz constant {} > L={lip}", sup * norm))?;
        Ok(Self { id: id.into(), k: w.len(), lip, sup, kind: TestKind::Ridge { w, b } })
    }

    pub fn product(left: TestFunction, right: TestFunction) -> Result<Self> {
        precondition(left.k == right.k && left.lip == right.lip && left.sup == right.sup, || {
            "product members must share k, L and M".into()
        })?;
        precondition(left.sup > 0.0, || "product renormalization needs M > 0".into())?;
        Ok(Self {
            id: format!("{}*{}", left.id, right.id),
            k: left.k,
            lip: left.lip,
            sup: left.sup,
            kind: TestKind::Product { left: Box::new(left), right: Box::new(right) },
        })
    }

    pub fn constant(k: usize, value: f64) -> Self {
        Self { id: format!("const[{value}]"), k, lip: 0.0, sup: value.abs(), kind: TestKind::Constant { value } }
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.k);
        match &self.kind {
            TestKind::Coordinate { index } => x[*index].clamp(-self.sup, self.sup),
            TestKind::Ridge { w, b } => {
                let s: f64 = w.iter().zip(x).map(|(a, b)| a * b).sum();
                self.sup * (s + b).tanh()
            }
            TestKind::Product { left, right } => left.eval(x) * right.eval(x) / (2.0 * self.sup),
            TestKind::Constant { value } => *value,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.kind, TestKind::Constant { .. })
    }

    /// Empirical check of the declared constants over random pairs at several
    /// scales. Returns the largest Lipschitz quotient seen.
    pub fn validate(&self, pairs: usize, rng: &mut dyn RngCore) -> Result<f64> {
        let mut worst = 0.0f64;
        for t in 0..pairs {
            let scale = [0.1, 1.0, 3.0, 10.0][t % 4];
            let x: Vec<f64> = (0..self.k).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
            let step = [1e-3, 0.1, 1.0][t % 3];
            let y: Vec<f64> = x.iter().map(|v| v + step * rng.sample::<f64, _>(StandardNormal)).collect();
            let (gx, gy) = (self.eval(&x), self.eval(&y));
            for g in [gx, gy] {
                if g.abs() > self.sup * (1.0 + LIP_SLACK) {
                    return Err(Error::Precondition(format!("{}: |g| = {} exceeds M = {}", self.id, g.abs(), self.sup)));
                }
            }
            let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            if dist > 0.0 {
                worst = worst.max((gx - gy).abs() / dist);
            }
        }
        if worst > self.lip * (1.0 + LIP_SLACK) {
            return Err(Error::Precondition(format!("{}: Lipschitz quotient {worst} exceeds L = {}", self.id, self.lip)));
        }
        Ok(worst)
    }
}

/// Ordered, seeded list of test functions sharing `(k, L, M)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCatalog {
    pub seed: u64,
    pub k: usize,
    pub lip: f64,
    pub sup: f64,
    pub members: Vec<TestFunction>,
}

/// Ridge count of [`TestCatalog::standard`].
pub const STANDARD_RIDGES: usize = 64;

impl TestCatalog {
    /// `size` members: the `k` clamped coordinates first (when `L ≥ 1`), then
    /// seeded ridges `M·tanh(w·x + b)` with `‖w‖ ∈ [L/(4M), L/M]` and `b ∈ [−1, 1]`,
    /// with the last quarter (for `size ≥ 8`) replaced by products of earlier
    /// members. Every member is validated before the catalog is returned.
    pub fn generate(k: usize, lip: f64, sup: f64, size: usize, seed: u64) -> Result<Self> {
        precondition(k >= 1 && size >= 1, || "catalog needs k >= 1 and size >= 1".into())?;
        precondition(lip > 0.0 && sup > 0.0, || format!("need L, M > 0, got L={lip}, M={sup}"))?;
        let n_products = if size >= 8 { size / 4 } else { 0 };
        Self::build(k, lip, sup, size - n_products, n_products, seed)
    }

    /// `k` coordinates, [`STANDARD_RIDGES`] ridges and 16 products.
    pub fn standard(k: usize, lip: f64, sup: f64, seed: u64) -> Result<Self> {
        let coords = if lip >= 1.0 { k } else { 0 };
        Self::build(k, lip, sup, coords + STANDARD_RIDGES, 16, seed)
    }

    fn build(k: usize, lip: f64, sup: f64, singles: usize, n_products: usize, seed: u64) -> Result<Self> {
        let mut rng = LabRng::seed_from_u64(seed);
        let mut members = Vec::with_capacity(singles + n_products);
        if lip >= 1.0 {
            for index in 0..k.min(singles) {
                members.push(TestFunction::coordinate(k, index, lip, sup)?);
            }
        }
        let mut ridge = 0;
        while members.len() < singles {
            let dir: Vec<f64> = (0..k).map(|_| rng.sample(StandardNormal)).collect();
            let dn = dir.iter().map(|v: &f64| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
            let norm = lip / sup * rng.random_range(0.25..=1.0);
            let w = dir.iter().map(|v| v / dn * norm).collect();
            let b = rng.random_range(-1.0..=1.0);
            members.push(TestFunction::ridge(format!("ridge[{ridge}]"), w, b, lip, sup)?);
            ridge += 1;
        }
        let base = members.len();
        for _ in 0..n_products {
            let i = rng.random_range(0..base);
            let j = rng.random_range(0..base);
            members.push(TestFunction::product(members[i].clone(), members[j].clone())?);
        }
        let mut check = LabRng::seed_from_u64(seed ^ 0x5eed_ca7a_1095_u64);
        for g in &members {
            g.validate(1_000, &mut check)?;
        }
        Ok(Self { seed, k, lip, sup, members })
    }

    /// A catalog with an explicit member list.
    pub fn from_members(members: Vec<TestFunction>, seed: u64) -> Result<Self> {
        let first = members.first().ok_or_else(|| Error::Precondition("empty catalog".into()))?;
        let (k, lip, sup) = (first.k, first.lip, first.sup);
        precondition(members.iter().all(|g| g.k == k), || "catalog members must share k".into())?;
        let lip = members.iter().map(|g| g.lip).fold(lip, f64::max);
        let sup = members.iter().map(|g| g.sup).fold(sup, f64::max);
        Ok(Self { seed, k, lip, sup, members })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Result of probing `F_r(x₁, …, x_r) = g(x₁)···g(x_r)` on `R^{kr}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductLipReport {
    pub id: String,
    pub r: usize,
    pub trials: usize,
    /// `r·L·M^{r−1}`.
    pub bound: f64,
    pub max_quotient: f64,
    pub violations: usize,
}

impl ProductLipReport {
    pub fn holds(&self) -> bool {
        self.violations == 0
    }
}

pub fn product_value(g: &TestFunction, xs: &[f64]) -> f64 {
    xs.chunks_exact(g.k).map(|x| g.eval(x)).product()
}

/// Samples `trials` random pairs in `R^{kr}` and compares every Lipschitz
/// quotient of `F_r` against `r·L·M^{r−1}`.
pub fn lipschitz_product_check(g: &TestFunction, r: usize, trials: usize, rng: &mut dyn RngCore) -> Result<ProductLipReport> {
    precondition(r >= 1, || "r must be >= 1".into())?;
    let bound = r as f64 * g.lip * g.sup.powi(r as i32 - 1);
    let d = g.k * r;
    let mut max_quotient = 0.0f64;
    let mut violations = 0;
    for t in 0..trials {
        let scale = [0.3, 1.0, 3.0][t % 3];
        let step = [1e-4, 1e-2, 0.5][(t / 3) % 3];
        let x: Vec<f64> = (0..d).map(|_| scale * rng.sample::<f64, _>(StandardNormal)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + step * rng.sample::<f64, _>(StandardNormal)).collect();
        let dist = x.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        if dist == 0.0 {
            continue;
        }
        let qt = (product_value(g, &x) - product_value(g, &y)).abs() / dist;
        max_quotient = max_quotient.max(qt);
        if qt > bound * (1.0 + LIP_SLACK) {
            violations += 1;
        }
    }
    Ok(ProductLipReport { id: g.id.clone(), r, trials, bound, max_quotient, violations })
}

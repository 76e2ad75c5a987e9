//! Versioned JSON experiment configuration. Every field except `kind` and
//! `master_seed` has a default, and a parsed config serializes back to a
//! document that parses to the same value.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::haar::DriftEstimator;
use crate::sources::sk::{SkModel, DEFAULT_BURNIN, DEFAULT_THIN};
use crate::sources::{
    isotropic_gaussian, sk_glauber, single_spike_gaussian, subgaussian_product, SubGaussianBase, VectorSource,
};
use crate::verify::{CavityConfig, LhsVariant, ZCoupling};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Concentration,
    TheoremScaling,
    SkCavity,
    Converse,
    HaarMoments,
    MetricsSelftest,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Concentration => "concentration",
            Self::TheoremScaling => "theorem-scaling",
            Self::SkCavity => "sk-cavity",
            Self::Converse => "converse",
            Self::HaarMoments => "haar-moments",
            Self::MetricsSelftest => "metrics-selftest",
        }
    }
}

/// `quick` gates decay slopes at −0.4, `full` at −0.45.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Profile {
    #[default]
    Quick,
    Full,
}

impl Profile {
    pub fn slope_gate(self) -> f64 {
        match self {
            Self::Quick => -0.4,
            Self::Full => -0.45,
        }
    }
}

/// The random vector under study; `N` comes from the experiment's `n_list`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    SubgaussianProduct {
        rho: f64,
        q: f64,
        base: SubGaussianBase,
    },
    Isotropic,
    SingleSpike,
    /// One disorder sample, drawn from the run's seed tree.
    Sk {
        beta: f64,
        h: f64,
        #[serde(default = "default_burnin")]
        burnin: usize,
        #[serde(default = "default_thin")]
        thin: usize,
    },
}

fn default_burnin() -> usize {
    DEFAULT_BURNIN
}
fn default_thin() -> usize {
    DEFAULT_THIN
}

impl Default for SourceSpec {
    fn default() -> Self {
        Self::SubgaussianProduct { rho: 1.0, q: 0.25, base: SubGaussianBase::RademacherShifted }
    }
}

impl SourceSpec {
    pub fn build(&self, n: usize, disorder_seed: u64) -> Result<Box<dyn VectorSource>> {
        Ok(match *self {
            Self::SubgaussianProduct { rho, q, base } => Box::new(subgaussian_product(n, rho, q, base)?),
            Self::Isotropic => Box::new(isotropic_gaussian(n)),
            Self::SingleSpike => Box::new(single_spike_gaussian(n)),
            Self::Sk { beta, h, burnin, thin } => {
                let model = SkModel::from_seed(n, beta, h, disorder_seed)?;
                Box::new(sk_glauber(std::sync::Arc::new(model), burnin, thin)?)
            }
        })
    }

    pub fn is_sk(&self) -> bool {
        matches!(self, Self::Sk { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HaarParams {
    /// Orders of the sampled matrices.
    pub orders: Vec<usize>,
    pub draws: usize,
    pub drift_n: usize,
    pub drift_epsilon: f64,
    pub drift_samples: usize,
    pub drift_estimators: Vec<DriftEstimator>,
}

impl Default for HaarParams {
    fn default() -> Self {
        Self {
            orders: vec![4, 6, 10],
            draws: 1_000_000,
            drift_n: 20,
            drift_epsilon: 0.02,
            drift_samples: 200_000,
            drift_estimators: vec![DriftEstimator::Plain, DriftEstimator::Antithetic],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConverseParams {
    pub pairs: usize,
    pub lambdas: Vec<f64>,
    pub laplace_samples: usize,
    /// Offset added to the declared `q` for the misspecified-overlap probe.
    pub wrong_q_offset: f64,
}

impl Default for ConverseParams {
    fn default() -> Self {
        Self { pairs: 200_000, lambdas: vec![0.5, 1.0, 2.0], laplace_samples: 200_000, wrong_q_offset: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoundParams {
    pub enabled: bool,
    pub p: usize,
    pub k: usize,
    pub cloud_size: usize,
    pub repeats: usize,
    pub concentration_pairs: usize,
}

impl Default for BoundParams {
    fn default() -> Self {
        Self { enabled: true, p: 1, k: 1, cloud_size: 512, repeats: 4, concentration_pairs: 4_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub kind: ExperimentKind,
    pub master_seed: u64,
    #[serde(default)]
    pub source: SourceSpec,
    #[serde(default = "default_n_list")]
    pub n_list: Vec<usize>,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_p")]
    pub p: usize,
    #[serde(default = "default_catalog_seed")]
    pub catalog_seed: u64,
    #[serde(default = "default_catalog_size")]
    pub catalog_size: usize,
    #[serde(default = "default_outer")]
    pub outer_draws: usize,
    #[serde(default = "default_inner")]
    pub inner_draws: usize,
    #[serde(default = "default_variant")]
    pub variant: LhsVariant,
    #[serde(default)]
    pub coupling: ZCoupling,
    /// Replica pairs for the concentration diagnostics.
    #[serde(default = "default_pairs")]
    pub pairs: usize,
    #[serde(default)]
    pub profile: Profile,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub haar: HaarParams,
    #[serde(default)]
    pub sk: CavityConfig,
    #[serde(default)]
    pub converse: ConverseParams,
    #[serde(default)]
    pub bound: BoundParams,
}

fn default_n_list() -> Vec<usize> {
    vec![64, 128, 256, 512, 1024]
}
fn default_k() -> usize {
    2
}
fn default_p() -> usize {
    1
}
fn default_catalog_seed() -> u64 {
    2024
}
fn default_catalog_size() -> usize {
    16
}
fn default_outer() -> usize {
    256
}
fn default_inner() -> usize {
    8192
}
fn default_variant() -> LhsVariant {
    LhsVariant::Full
}
fn default_pairs() -> usize {
    2_000
}

fn config_error(path: &str, message: impl Into<String>) -> Error {
    Error::Config { path: path.into(), message: message.into() }
}

impl ExperimentConfig {
    /// A config of the given kind with every other field at its default.
    pub fn new(kind: ExperimentKind, master_seed: u64) -> Self {
        let doc = serde_json::json!({ "schema_version": SCHEMA_VERSION, "kind": kind, "master_seed": master_seed });
        serde_json::from_value(doc).expect("defaults form a valid config")
    }

    /// Parses and validates a JSON document. Errors carry the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_error(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(config_error(
                "schema_version",
                format!("unsupported schema version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.n_list.is_empty() {
            return Err(config_error("n_list", "must not be empty"));
        }
        if let Some(&n) = self.n_list.iter().find(|&&n| n <= self.k.max(1)) {
            return Err(config_error("n_list", format!("N = {n} must exceed k = {}", self.k)));
        }
        if self.k == 0 {
            return Err(config_error("k", "must be >= 1"));
        }
        if self.p == 0 {
            return Err(config_error("p", "must be >= 1"));
        }
        if self.outer_draws < 2 {
            return Err(config_error("outer_draws", "must be >= 2"));
        }
        if self.inner_draws < 2 * self.p {
            return Err(config_error("inner_draws", "must be >= 2p"));
        }
        if self.pairs < 2 {
            return Err(config_error("pairs", "must be >= 2"));
        }
        if let SourceSpec::SubgaussianProduct { rho, q, .. } = self.source {
            if !(q >= 0.0 && q < rho) {
                return Err(config_error("source", format!("need 0 <= q < rho, got rho={rho}, q={q}")));
            }
        }
        if let Some(&n) = self.haar.orders.iter().find(|&&n| n < 4) {
            return Err(config_error("haar.orders", format!("order {n} is below 4")));
        }
        if self.converse.lambdas.iter().any(|l| *l < 0.0) {
            return Err(config_error("converse.lambdas", "entries must be >= 0"));
        }
        Ok(())
    }

    /// SHA-256 of the canonical (compact) serialization, hex-encoded.
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let bytes = serde_json::to_vec(self).expect("config is always serializable");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_fills_defaults_and_round_trips() {
        let cfg = ExperimentConfig::from_json(r#"{"schema_version":1,"kind":"converse","master_seed":5}"#).unwrap();
        assert_eq!(cfg.k, 2);
        assert_eq!(cfg.n_list, vec![64, 128, 256, 512, 1024]);
        assert_eq!(cfg.sk.disorders, 32);
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(back.digest(), cfg.digest());
        assert_eq!(ExperimentConfig::new(ExperimentKind::Converse, 5), cfg);
    }

    #[test]
    fn master_seed_is_mandatory() {
        let err = ExperimentConfig::from_json(r#"{"schema_version":1,"kind":"converse"}"#).unwrap_err();
        assert!(err.to_string().contains("master_seed"), "{err}");
    }

    #[test]
    fn errors_name_the_field() {
        let err = ExperimentConfig::from_json(r#"{"schema_version":1,"kind":"converse","master_seed":1,"haar":{"draws":"many"}}"#)
            .unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "haar.draws"),
            other => panic!("unexpected {other}"),
        }
        let err = ExperimentConfig::from_json(r#"{"schema_version":1,"kind":"converse","master_seed":1,"k":0}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "k"));
        let err = ExperimentConfig::from_json(r#"{"schema_version":2,"kind":"converse","master_seed":1}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "schema_version"));
        let err = ExperimentConfig::from_json(r#"{"schema_version":1,"kind":"nope","master_seed":1}"#).unwrap_err();
        assert!(matches!(err, Error::Config { ref path, .. } if path == "kind"));
    }

    #[test]
    fn source_specs_build() {
        let spec: SourceSpec = serde_json::from_str(r#"{"type":"sk","beta":0.3,"h":0.3}"#).unwrap();
        let src = spec.build(16, 3).unwrap();
        assert_eq!(src.dim(), 16);
        assert!(spec.is_sk());
        let bad = SourceSpec::SubgaussianProduct { rho: 1.0, q: 1.0, base: SubGaussianBase::Gaussian };
        assert!(bad.build(8, 0).is_err());
    }
}

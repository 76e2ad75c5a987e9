pub mod error;
pub mod experiment;
pub mod haar;
pub mod metrics;
pub mod projection;
pub mod quadrature;
pub mod rs_algebra;
pub mod seed;
pub mod selftest;
pub mod sources;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};

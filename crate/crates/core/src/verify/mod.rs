//! Quantitative claims as executable checks: concentration diagnostics and
//! rates, unbiased replica estimators of the projection theorem's left-hand
//! sides, decay-order and upper-bound checks, the converse functionals, and the
//! SK cavity-field pipeline.

pub mod cavity;
pub mod concentration;
pub mod converse;
pub mod lhs;
pub mod scaling;

pub use cavity::{sk_cavity, CavityConfig, CavityReport};
pub use concentration::{concentration_report, rates, ConcentrationReport, Rates};
pub use converse::{
    converse_cosh, converse_laplace, isotropic_cosh_reference, isotropic_laplace_reference, wrong_q_lower_bound,
    LaplacePoint,
};
pub use lhs::{
    catalog_sup, lhs_moment, lhs_moment_full, lhs_moment_partial, LhsConfig, LhsVariant, TheoremLhsEstimate,
    ZCoupling,
};
pub use scaling::{scaling_check, w1_bound_check, w1_upper_bound, BoundConfig, BoundPoint, ScalingReport};

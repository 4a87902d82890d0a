//! Nondominated distance-bounding protocol instances.
//!
//! Instances are generated from a protocol catalog, filtered by a mafia-fraud
//! bound and reduced to the instances no other instance dominates, where
//! dominance is taken over eight attributes compared with per-attribute
//! approximate-equality relations.
//!
//! ```
//! use dbpareto_core::{Engine, ParetoRequest};
//!
//! let engine = Engine::builtin();
//! let out = engine.pareto(&ParetoRequest::new("2^-16")).unwrap();
//! assert!(out.rows.iter().any(|r| r.id == "BC-{16}"));
//! ```

pub mod api;
pub mod attribute;
pub mod bound;
pub mod catalog;
pub mod config;
pub mod golden;
pub mod oracle;
pub mod pareto;
pub mod report;
pub mod spider;

pub use api::{ApiError, Engine, ParetoRequest, ParetoResponse, SpiderRequest};
pub use attribute::{
    approx_equal, dominates, strictly_precedes, ApproxSpec, AttributeId, AttributeValue,
    AttributeVector, Probability, Tolerances,
};
pub use bound::MafiaBound;
pub use catalog::{
    generate_all, generate_instances, Catalog, CatalogError, GlobalConstants, ProtocolDescriptor,
    ProtocolId, ProtocolInstance, ProtocolParams, Provenance,
};
pub use config::RunConfig;
pub use oracle::{naive_nondominated, McEstimate};
pub use pareto::{filter_mafia_bound, nondominated, representative_rows, SolutionSet, SummaryRow};
pub use report::{emit_table, scale_memory, scale_security, Format, ScaledRow};
pub use spider::{emit_spider, SpiderAxisConfig};

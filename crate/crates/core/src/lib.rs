//! Statistical disclosure control toolkit.
//!
//! Privacy models from the k-anonymity family (k-anonymity, probabilistic
//! k-anonymity, l-diversity, t-closeness) and the differential-privacy family
//! (pure and approximate DP, Rényi/zCDP conversions, metric and individual
//! DP), together with an attack harness that measures what a release
//! actually leaks and utility metrics for the privacy/utility trade-off.

pub mod attack;
pub mod conf;
pub mod data;
pub mod distance;
pub mod dp;
pub mod error;
pub mod hierarchy;
pub mod kanon;
pub mod pipeline;
pub mod probk;
pub mod release;
pub mod rng;
pub mod stats;
pub mod utility;

pub use data::{load_table, suppress_identifiers, AttributeKind, AttributeSchema, MicrodataTable, Role, SchemaDescriptor, Value};
pub use error::{Result, SdcError};
pub use hierarchy::{generalize_value, Hierarchy, HierarchySet};
pub use release::{AnonymizedRelease, Partition, PrivacyParams, Provenance};

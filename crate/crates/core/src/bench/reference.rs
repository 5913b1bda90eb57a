//! Best known objective values of the unconstrained registry problems.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

/// A stored optimum: the value and the point attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceOptimum {
    pub f: f64,
    /// Point in the JSON form of [`crate::domain::Domain::point_to_json`].
    pub point: String,
}

const FIXTURE: &str = include_str!("../../fixtures/reference_optima.json");

/// Every stored optimum, keyed by registry name.
pub fn reference_optima() -> &'static BTreeMap<String, ReferenceOptimum> {
    static TABLE: OnceLock<BTreeMap<String, ReferenceOptimum>> = OnceLock::new();
    TABLE.get_or_init(|| serde_json::from_str(FIXTURE).expect("reference fixture is valid JSON"))
}

/// Stored optimum value of a registry problem, if any.
pub fn reference_optimum(name: &str) -> Option<f64> {
    reference_optima()
        .get(&name.to_ascii_lowercase())
        .map(|r| r.f)
}

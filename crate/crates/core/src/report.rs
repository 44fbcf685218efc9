use serde::{Deserialize, Serialize};

use crate::taxonomy::Taxonomy;

/// Two-part decomposition of one string, exact or estimated.
///
/// `delta = n - k2` is the randomness deficiency and `rho = k2 - sd_len(phi)`
/// the residual entropy left in the program part.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FacticityReport {
    pub n: u64,
    pub k2: u64,
    pub phi: u64,
    pub delta: i64,
    pub rho: i64,
    pub label: Taxonomy,
    /// Exact value from a complete enumeration (always false for estimates).
    pub certified: bool,
    pub estimated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

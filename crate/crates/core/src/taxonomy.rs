//! Labels for where a string sits in the (complexity, facticity) plane.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::collapse::{facticity_threshold, MAX_BLOCK};
use crate::error::{domain, Result};
use crate::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Taxonomy {
    NonStochastic,
    PurelyStochastic,
    StochasticMixed,
    AboveThresholdComputable,
    AboveThresholdAbsolute,
}

impl Taxonomy {
    pub fn as_str(self) -> &'static str {
        match self {
            Taxonomy::NonStochastic => "non_stochastic",
            Taxonomy::PurelyStochastic => "purely_stochastic",
            Taxonomy::StochasticMixed => "stochastic_mixed",
            Taxonomy::AboveThresholdComputable => "above_threshold_computable",
            Taxonomy::AboveThresholdAbsolute => "above_threshold_absolute",
        }
    }
}

impl fmt::Display for Taxonomy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Additive constant `c0` of the small-model line and the threshold, and the
/// relative band `tau` under `phi = K2` that still counts as non-stochastic.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaxonomyParams {
    pub c0: u64,
    pub tau: Real,
}

impl Default for TaxonomyParams {
    fn default() -> Self {
        Self { c0: 4, tau: 0.05 }
    }
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// Largest block size `k` with `k 2^k <= n`, at least 1 and at most 24.
pub fn block_size_for(n: u64) -> u32 {
    (1..=MAX_BLOCK)
        .take_while(|&k| (k as u64) << k <= n)
        .last()
        .unwrap_or(1)
}

pub fn taxonomy_label(phi: u64, k2: u64, n: u64, k: u32) -> Result<Taxonomy> {
    taxonomy_label_with(phi, k2, n, k, TaxonomyParams::default())
}

/// Decision order: the small-model line, then the band near `phi = K2`, then the
/// facticity threshold at `s = K2 / n`; everything else is mixed.
pub fn taxonomy_label_with(
    phi: u64,
    k2: u64,
    n: u64,
    k: u32,
    params: TaxonomyParams,
) -> Result<Taxonomy> {
    if phi > k2 || k2 > n + 1 {
        return Err(domain(format!(
            "inconsistent lengths: phi={phi}, k2={k2}, n={n} (need phi <= k2 <= n + 1)"
        )));
    }
    if !(0.0..1.0).contains(&params.tau) {
        return Err(domain(format!("tau {} outside [0, 1)", params.tau)));
    }
    let small_model = ceil_log2(n) + ceil_log2(k as u64) + params.c0;
    if phi <= small_model {
        return Ok(Taxonomy::PurelyStochastic);
    }
    if phi as Real >= (1.0 - params.tau) * k2 as Real {
        return Ok(Taxonomy::NonStochastic);
    }
    let s = if n == 0 {
        1.0
    } else {
        (k2 as Real / n as Real).clamp(0.0, 1.0)
    };
    let threshold: Real = facticity_threshold(k, s, params.c0)?;
    if phi as Real > threshold {
        if phi as Real >= (1.0 - params.tau) * n as Real / 2.0 {
            return Ok(Taxonomy::AboveThresholdAbsolute);
        }
        return Ok(Taxonomy::AboveThresholdComputable);
    }
    Ok(Taxonomy::StochasticMixed)
}

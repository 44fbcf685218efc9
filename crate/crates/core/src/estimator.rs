//! Facticity estimates for arbitrary data from explicit two-part model classes.
//!
//! Each candidate charges an exact model length in bits plus the ideal code
//! length of the data under that model. The cheapest total stands in for
//! `K2` and its model part for facticity.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcodec::{floor_log2, sd_len, BitString};
use crate::collapse::{collapse_prob, facticity_threshold};
use crate::entropy::{inverse_entropy_bisect, EntropyValue};
use crate::error::{domain, Result};
use crate::report::FacticityReport;
use crate::scalar::Scalar;
use crate::special::log2_binomial;
use crate::taxonomy::{block_size_for, taxonomy_label, Taxonomy};

/// Largest context order tried for the block-Markov class.
pub const MAX_MARKOV_ORDER: u32 = 8;
/// Bits per quantized conditional probability.
const PROB_BITS: u32 = 8;
const PROB_SCALE: f64 = (1u32 << PROB_BITS) as f64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    Empty,
    Bernoulli,
    BlockMarkov(u32),
    Singleton,
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Empty => f.write_str("empty"),
            ModelId::Bernoulli => f.write_str("bernoulli"),
            ModelId::BlockMarkov(m) => write!(f, "block_markov({m})"),
            ModelId::Singleton => f.write_str("singleton"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelCandidate<T> {
    pub id: ModelId,
    pub model_bits: u64,
    pub data_bits: T,
}

impl<T: Scalar> ModelCandidate<T> {
    /// `model_bits + ceil(data_bits)`.
    pub fn total(&self) -> u64 {
        self.model_bits + self.data_bits.ceil().to_u64().unwrap_or(u64::MAX)
    }
}

/// Bits of the self-delimiting frame around the binary form of `n`.
fn framed_count(n: u64) -> u64 {
    let width = if n == 0 {
        1
    } else {
        floor_log2(n) as usize + 1
    };
    sd_len(width) as u64
}

fn ceil_log2(n: u64) -> u64 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros() as u64
    }
}

/// Context orders the block-Markov class tries for a string of `n` bits:
/// `1..=8` with `m <= log2 n - 2`.
pub fn markov_orders(n: u64) -> impl Iterator<Item = u32> {
    let limit = if n == 0 {
        -1.0
    } else {
        (n as f64).log2() - 2.0
    };
    (1..=MAX_MARKOV_ORDER).filter(move |&m| m as f64 <= limit)
}

/// Probability of a one, quantized to 8 bits and kept inside `(0, 1)`.
fn quantized_one_prob(ones: u64, total: u64) -> f64 {
    let p = (ones as f64 + 0.5) / (total as f64 + 1.0);
    (p * PROB_SCALE).round().clamp(1.0, PROB_SCALE - 1.0) / PROB_SCALE
}

fn markov_candidate<T: Scalar>(x: &BitString, m: u32) -> ModelCandidate<T> {
    let n = x.len() as u64;
    let contexts = 1usize << m;
    let mut ones = vec![0u64; contexts];
    let mut totals = vec![0u64; contexts];
    let mask = contexts - 1;
    let mut ctx = 0usize;
    for (j, &b) in x.bits().iter().enumerate() {
        if j >= m as usize {
            totals[ctx] += 1;
            ones[ctx] += b as u64;
        }
        ctx = ((ctx << 1) | b as usize) & mask;
    }
    let mut data = T::count(m.min(n as u32) as u64);
    for (&c1, &tot) in ones.iter().zip(&totals) {
        if tot == 0 {
            continue;
        }
        let q = T::lit(quantized_one_prob(c1, tot));
        let c0 = tot - c1;
        data = data - T::count(c1) * q.log2() - T::count(c0) * (T::one() - q).log2();
    }
    ModelCandidate {
        id: ModelId::BlockMarkov(m),
        model_bits: 3 + framed_count(n) + contexts as u64 * PROB_BITS as u64,
        data_bits: data,
    }
}

/// Every candidate two-part code for `x`: empty, Bernoulli, block-Markov for
/// each admissible order, and singleton.
pub fn model_costs<T: Scalar>(x: &BitString) -> Result<Vec<ModelCandidate<T>>> {
    let n = x.len() as u64;
    if n == 0 {
        return Err(domain("model costs need a non-empty string"));
    }
    let ones = x.count_ones() as u64;
    let mut out = Vec::with_capacity(3 + MAX_MARKOV_ORDER as usize);
    out.push(ModelCandidate {
        id: ModelId::Empty,
        model_bits: 0,
        data_bits: T::count(n),
    });
    out.push(ModelCandidate {
        id: ModelId::Bernoulli,
        model_bits: framed_count(n) + ceil_log2(n + 1),
        data_bits: log2_binomial(n, ones)?,
    });
    for m in markov_orders(n) {
        out.push(markov_candidate(x, m));
    }
    out.push(ModelCandidate {
        id: ModelId::Singleton,
        model_bits: (sd_len(n as usize) as u64) + n,
        data_bits: T::zero(),
    });
    Ok(out)
}

/// Cheapest candidate; ties go to the smaller model.
pub fn best_candidate<T: Scalar>(candidates: &[ModelCandidate<T>]) -> Option<&ModelCandidate<T>> {
    candidates.iter().min_by_key(|c| (c.total(), c.model_bits))
}

pub fn estimate<T: Scalar>(x: &BitString) -> Result<FacticityReport> {
    let candidates = model_costs::<T>(x)?;
    let winner = best_candidate(&candidates).expect("at least the empty candidate");
    let n = x.len() as u64;
    let k2 = winner.total();
    let phi = winner.model_bits;
    let label = taxonomy_label(phi, k2, n, block_size_for(n))?;
    Ok(FacticityReport {
        n,
        k2,
        phi,
        delta: n as i64 - k2 as i64,
        rho: (k2 as i64 - sd_len(phi as usize) as i64).max(0),
        label,
        certified: false,
        estimated: true,
        model: Some(winner.id.to_string()),
    })
}

/// `4 (c/n) ((n - c)/n)`: 0 at both ends, 1 at `c = n/2`.
pub fn normalized_facticity<T: Scalar>(c_hat: u64, n: u64) -> Result<T> {
    if n == 0 || c_hat > n {
        return Err(domain(format!(
            "normalized facticity needs 0 <= c <= n, n >= 1; got c={c_hat}, n={n}"
        )));
    }
    let nn = T::count(n);
    Ok(T::lit(4.0) * (T::count(c_hat) / nn) * (T::count(n - c_hat) / nn))
}

/// Length, source entropy and seed of one i.i.d. binary string.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StochasticSpec<T> {
    pub n: usize,
    pub s: EntropyValue<T>,
    pub seed: u64,
}

impl<T: Scalar> StochasticSpec<T> {
    pub fn new(n: usize, s: T, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(domain("stochastic strings need n >= 1"));
        }
        Ok(Self {
            n,
            s: EntropyValue::new(s)?,
            seed,
        })
    }
}

/// i.i.d. Bernoulli bits with `p = H^{-1}(s)`.
pub fn gen_stochastic<T: Scalar>(spec: &StochasticSpec<T>) -> Result<BitString> {
    let p = inverse_entropy_bisect(spec.s.get())?.as_f64();
    Ok(bernoulli_bits(spec.n, p, spec.seed))
}

/// `n` i.i.d. bits with one-probability `p` from a seeded ChaCha8 stream.
pub fn bernoulli_bits(n: usize, p: f64, seed: u64) -> BitString {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen::<f64>() < p).collect()
}

/// Derives an independent seed for cell `index` of a run seeded with `seed`.
pub fn cell_seed(seed: u64, index: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    mix(seed ^ mix(index))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow<T> {
    pub s: T,
    pub p: T,
    pub rep: usize,
    pub n: u64,
    pub k2_hat: u64,
    pub phi_hat: u64,
    pub rho_hat: i64,
    pub delta_hat: i64,
    pub label: Taxonomy,
    pub phi_collapse: T,
    pub threshold_bits: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepTable<T> {
    pub k: u32,
    pub n: u64,
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Scalar> SweepTable<T> {
    /// Mean `phi_hat` over rows whose entropy satisfies `pred`.
    pub fn mean_phi_where(&self, pred: impl Fn(T) -> bool) -> Option<f64> {
        let (sum, count) = self
            .rows
            .iter()
            .filter(|r| pred(r.s))
            .fold((0u64, 0u64), |(s, c), r| (s + r.phi_hat, c + 1));
        (count > 0).then(|| sum as f64 / count as f64)
    }

    /// Grid points in order, with the mean `phi_hat` over reps at each.
    pub fn mean_phi_by_s(&self) -> Vec<(T, f64)> {
        let mut out: Vec<(T, u64, u64)> = Vec::new();
        for r in &self.rows {
            match out.last_mut() {
                Some(last) if last.0 == r.s => {
                    last.1 += r.phi_hat;
                    last.2 += 1;
                }
                _ => out.push((r.s, r.phi_hat, 1)),
            }
        }
        out.into_iter()
            .map(|(s, sum, c)| (s, sum as f64 / c as f64))
            .collect()
    }
}

/// Entropy sweep at block size `k` over strings of length `k 2^k`.
///
/// Cells `(s, rep)` run in parallel, each with its own seed derived from
/// `(seed, cell index)`, so the table does not depend on scheduling.
pub fn sweep<T: Scalar>(
    k: u32,
    grid_points: usize,
    reps: usize,
    seed: u64,
) -> Result<SweepTable<T>> {
    if !(2..=12).contains(&k) {
        return Err(domain(format!("sweep block size {k} outside 2..=12")));
    }
    if grid_points < 2 || reps == 0 {
        return Err(domain("sweep needs at least 2 grid points and 1 rep"));
    }
    let n = (k as u64) << k;
    let last = T::count(grid_points as u64 - 1);
    let cells: Vec<(usize, usize)> = (0..grid_points)
        .flat_map(|g| (0..reps).map(move |r| (g, r)))
        .collect();
    let rows = cells
        .par_iter()
        .enumerate()
        .map(|(cell, &(g, rep))| -> Result<SweepRow<T>> {
            let s = if g + 1 == grid_points {
                T::one()
            } else {
                T::count(g as u64) / last
            };
            let spec = StochasticSpec::new(n as usize, s, cell_seed(seed, cell as u64))?;
            let x = gen_stochastic(&spec)?;
            let report = estimate::<T>(&x)?;
            Ok(SweepRow {
                s,
                p: inverse_entropy_bisect(s)?,
                rep,
                n,
                k2_hat: report.k2,
                phi_hat: report.phi,
                rho_hat: report.rho,
                delta_hat: report.delta,
                label: report.label,
                phi_collapse: collapse_prob(k, s)?,
                threshold_bits: facticity_threshold(k, s, 0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { k, n, rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cost(cands: &[ModelCandidate<f64>], id: ModelId) -> ModelCandidate<f64> {
        *cands.iter().find(|c| c.id == id).unwrap()
    }

    #[test]
    fn zeros_use_the_count_model() {
        let x = BitString::repeat(false, 4096);
        let cands = model_costs::<f64>(&x).unwrap();
        let b = cost(&cands, ModelId::Bernoulli);
        assert_eq!(b.data_bits, 0.0);
        // sd frame of the 13-bit length (20) + 13-bit count
        assert_eq!(b.model_bits, 33);
        let r = estimate::<f64>(&x).unwrap();
        assert_eq!(r.model.as_deref(), Some("bernoulli"));
        assert_eq!((r.k2, r.phi, r.delta), (33, 33, 4096 - 33));
    }

    #[test]
    fn uniform_random_prefers_empty() {
        let x = bernoulli_bits(4096, 0.5, 11);
        let cands = model_costs::<f64>(&x).unwrap();
        let b = cost(&cands, ModelId::Bernoulli);
        assert!(b.total() > 4096);
        let r = estimate::<f64>(&x).unwrap();
        assert_eq!(r.phi, 0);
        assert_eq!(r.k2, 4096);
        assert_eq!(r.model.as_deref(), Some("empty"));
    }

    #[test]
    fn singleton_never_wins() {
        for n in 1..200u64 {
            let x = bernoulli_bits(n as usize, 0.3, n);
            let cands = model_costs::<f64>(&x).unwrap();
            let single = cost(&cands, ModelId::Singleton);
            assert!(single.total() > n);
            assert_ne!(best_candidate(&cands).unwrap().id, ModelId::Singleton);
        }
    }

    #[test]
    fn biased_source_ratio() {
        let x = bernoulli_bits(4096, 0.11, 3);
        let r = estimate::<f64>(&x).unwrap();
        let ratio = r.k2 as f64 / 4096.0;
        assert!((ratio - 0.51).abs() <= 0.03, "{ratio}");
    }

    #[test]
    fn markov_orders_respect_length() {
        assert_eq!(markov_orders(16).collect::<Vec<_>>(), vec![1, 2]);
        assert_eq!(markov_orders(7).count(), 0);
        assert_eq!(markov_orders(1 << 20).count(), 8);
    }

    #[test]
    fn periodic_data_prefers_markov() {
        let x: BitString = (0..4096).map(|j| (j / 3) % 2 == 0).collect();
        let r = estimate::<f64>(&x).unwrap();
        assert!(r.model.unwrap().starts_with("block_markov"));
        assert!(r.k2 < 400);
    }

    #[test]
    fn normalized_facticity_values() {
        assert_eq!(normalized_facticity::<f64>(50, 100).unwrap(), 1.0);
        assert_eq!(normalized_facticity::<f64>(0, 100).unwrap(), 0.0);
        assert_eq!(normalized_facticity::<f64>(100, 100).unwrap(), 0.0);
        assert!(normalized_facticity::<f64>(101, 100).is_err());
        assert!(normalized_facticity::<f64>(0, 0).is_err());
        for c in 0..=100 {
            let a: f64 = normalized_facticity(c, 100).unwrap();
            let b: f64 = normalized_facticity(100 - c, 100).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn stochastic_generation() {
        let zeros = gen_stochastic(&StochasticSpec::new(500, 0.0f64, 1).unwrap()).unwrap();
        assert_eq!(zeros, BitString::repeat(false, 500));
        let a = gen_stochastic(&StochasticSpec::new(500, 0.7f64, 9).unwrap()).unwrap();
        let b = gen_stochastic(&StochasticSpec::new(500, 0.7f64, 9).unwrap()).unwrap();
        assert_eq!(a, b);
        let fair = gen_stochastic(&StochasticSpec::new(10_000, 1.0f64, 5).unwrap()).unwrap();
        let frac = fair.count_ones() as f64 / 10_000.0;
        assert!((frac - 0.5).abs() <= 0.015, "{frac}");
        assert!(StochasticSpec::new(0, 0.5f64, 1).is_err());
    }

    #[test]
    fn estimate_rejects_empty() {
        assert!(estimate::<f64>(&BitString::new()).is_err());
    }

    #[test]
    fn small_sweep_shape() {
        let t = sweep::<f64>(4, 5, 3, 1).unwrap();
        assert_eq!(t.n, 64);
        assert_eq!(t.rows.len(), 15);
        assert_eq!(t.rows[0].s, 0.0);
        assert_eq!(t.rows[14].s, 1.0);
        assert_eq!(t, sweep::<f64>(4, 5, 3, 1).unwrap());
        assert!(sweep::<f64>(1, 5, 3, 1).is_err());
    }
}

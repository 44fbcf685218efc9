//! Analytic curves for stochastic strings sampled with block size `k`:
//! the no-model probability, the collapse probability `Φ_k(s)`, the facticity
//! threshold, and the maximal-facticity and saturation bounds.

use serde::{Deserialize, Serialize};

use crate::entropy::{inverse_entropy_bisect, EntropyValue};
use crate::error::{domain, Error, Result};
use crate::scalar::Scalar;
pub use crate::special::log2_binomial;

/// Largest block size the collapse formulas accept (`2^k` must stay exact).
pub const MAX_BLOCK: u32 = 24;

/// Block size, string length and source entropy.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockParams<T> {
    pub k: u32,
    pub n: u64,
    pub s: EntropyValue<T>,
}

impl<T: Scalar> BlockParams<T> {
    pub fn new(k: u32, n: u64, s: T) -> Result<Self> {
        check_block(k)?;
        if n < k as u64 {
            return Err(domain(format!(
                "string length {n} shorter than block size {k}"
            )));
        }
        Ok(Self {
            k,
            n,
            s: EntropyValue::new(s)?,
        })
    }

    /// The canonical parameters `n = k 2^k`.
    pub fn canonical(k: u32, s: T) -> Result<Self> {
        check_block(k)?;
        Self::new(k, k as u64 * (1u64 << k), s)
    }

    pub fn epsilon(&self) -> Result<T> {
        epsilon_no_model(self.n, self.k, self.s.get())
    }
}

fn check_block(k: u32) -> Result<()> {
    if (1..=MAX_BLOCK).contains(&k) {
        Ok(())
    } else {
        Err(domain(format!("block size {k} outside 1..={MAX_BLOCK}")))
    }
}

/// `(1 - p^k)^trials` evaluated as `exp(trials * ln(1 - p^k))`.
fn survival<T: Scalar>(p: T, k: u32, trials: T) -> T {
    let pk = p.powi(k as i32);
    (trials * (-pk).ln_1p()).exp()
}

/// Probability that a length-`n` stochastic string has no small optimal model:
/// `(1 - H^{-1}(s)^k)^(n/k)`, real division.
pub fn epsilon_no_model<T: Scalar>(n: u64, k: u32, s: T) -> Result<T> {
    if k == 0 {
        return Err(domain("block size must be at least 1"));
    }
    if n < k as u64 {
        return Err(domain(format!(
            "string length {n} shorter than block size {k}"
        )));
    }
    let p = inverse_entropy_bisect(s)?;
    Ok(survival(p, k, T::count(n) / T::count(k as u64)))
}

/// Collapse probability `Φ_k(s) = (1 - H^{-1}(s)^k)^(2^k)`.
pub fn collapse_prob<T: Scalar>(k: u32, s: T) -> Result<T> {
    check_block(k)?;
    let p = inverse_entropy_bisect(s)?;
    Ok(survival(p, k, T::count(1u64 << k)))
}

/// `log2 C(2^k, ceil(2^k Φ_k(s))) + k + log2 k + c`, in bits.
pub fn facticity_threshold<T: Scalar>(k: u32, s: T, c: u64) -> Result<T> {
    let phi = collapse_prob(k, s)?;
    let space = 1u64 << k;
    let occupied = (T::count(space) * phi)
        .ceil()
        .to_u64()
        .unwrap_or(space)
        .min(space);
    let kk = T::count(k as u64);
    Ok(log2_binomial::<T>(space, occupied)? + kk + kk.log2() + T::count(c))
}

/// `2^k + k + log2 k + c`: the largest facticity a stochastic string of length
/// `k 2^k` can have.
pub fn max_facticity_bound<T: Scalar>(k: u32, c: u64) -> Result<T> {
    check_block(k)?;
    let kk = T::count(k as u64);
    Ok(T::count(1u64 << k) + kk + kk.log2() + T::count(c))
}

/// `2^(u + 2 floor(log2 u) + 1)`: beyond this model length it is cheaper to
/// prefix a universal machine of index length `u` and treat the model as data.
pub fn saturation_bound(u_len: u64) -> Result<u64> {
    if u_len == 0 {
        return Err(domain("universal index length must be at least 1"));
    }
    let exponent = u_len
        .checked_add(2 * crate::bitcodec::floor_log2(u_len) as u64 + 1)
        .ok_or_else(|| Error::Overflow(format!("exponent for u_len={u_len}")))?;
    if exponent > 62 {
        return Err(Error::Overflow(format!(
            "saturation exponent {exponent} exceeds 62 for u_len={u_len}"
        )));
    }
    Ok(1u64 << exponent)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_examples() {
        let direct = (1.0f64 - 2f64.powi(-8)).powi(256);
        assert!((direct - 0.3672).abs() < 1e-3);
        let e: f64 = epsilon_no_model(2048, 8, 1.0).unwrap();
        assert!((e - direct).abs() < 1e-12);
        for i in 0..=20 {
            let s = i as f64 / 20.0;
            let a: f64 = epsilon_no_model(4 * 16, 4, s).unwrap();
            let b: f64 = collapse_prob(4, s).unwrap();
            assert_eq!(a, b);
        }
        let near_zero: f64 = epsilon_no_model(2048, 8, 1e-9).unwrap();
        assert!((near_zero - 1.0).abs() < 1e-12);
        assert!(epsilon_no_model::<f64>(3, 8, 0.5).is_err());
        assert!(epsilon_no_model::<f64>(64, 0, 0.5).is_err());
        assert!(epsilon_no_model::<f64>(64, 4, 1.5).is_err());
    }

    #[test]
    fn collapse_examples() {
        let direct4 = (15.0f64 / 16.0).powi(16);
        assert!((direct4 - 0.3561).abs() < 1e-3);
        assert!((collapse_prob(4, 1.0f64).unwrap() - direct4).abs() < 1e-12);
        assert!((collapse_prob(8, 1.0f64).unwrap() - 0.3672).abs() < 1e-3);
        let half: f64 = collapse_prob(8, 0.5).unwrap();
        assert!((half - 0.999_994).abs() < 1e-5, "{half}");
        assert!(collapse_prob::<f64>(25, 0.5).is_err());
        assert!(collapse_prob::<f64>(0, 0.5).is_err());
    }

    #[test]
    fn collapse_monotone_in_entropy() {
        for k in 1..=12 {
            let mut prev = f64::INFINITY;
            for i in 1..=200 {
                let v: f64 = collapse_prob(k, i as f64 / 200.0).unwrap();
                assert!(v <= prev + 1e-15, "k={k} i={i}");
                prev = v;
            }
        }
    }

    #[test]
    fn threshold_examples() {
        let t: f64 = facticity_threshold(4, 1.0, 0).unwrap();
        assert!((t - 18.97).abs() < 0.05, "{t}");
        // bits at the binomial peak, m = 2^(k-1)
        let peak = log2_binomial::<f64>(256, 128).unwrap() + 8.0 + 3.0;
        assert!((peak - 262.67).abs() < 0.1);
        assert!(facticity_threshold::<f64>(30, 0.5, 0).is_err());
    }

    #[test]
    fn threshold_below_max_bound() {
        for k in 1..=14 {
            let bound: f64 = max_facticity_bound(k, 0).unwrap();
            for i in 0..=100 {
                let t: f64 = facticity_threshold(k, i as f64 / 100.0, 0).unwrap();
                assert!(t <= bound + 1.0, "k={k} i={i}");
            }
        }
    }

    #[test]
    fn max_bound_examples() {
        assert_eq!(max_facticity_bound::<f64>(8, 0).unwrap(), 267.0);
        assert_eq!(max_facticity_bound::<f64>(1, 0).unwrap(), 3.0);
        let mut prev = f64::INFINITY;
        for k in 2..=20u32 {
            let ratio =
                max_facticity_bound::<f64>(k, 0).unwrap() / (k as f64 * 2f64.powi(k as i32));
            assert!(ratio < prev, "k={k}");
            prev = ratio;
        }
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturation_bound(7).unwrap(), 4096);
        assert_eq!(saturation_bound(1).unwrap(), 4);
        assert!(matches!(saturation_bound(60), Err(Error::Overflow(_))));
        assert!(saturation_bound(0).is_err());
    }

    #[test]
    fn block_params_validate() {
        assert!(BlockParams::new(8, 4, 0.5f64).is_err());
        let p = BlockParams::canonical(8, 1.0f64).unwrap();
        assert_eq!(p.n, 2048);
        assert!((p.epsilon().unwrap() - collapse_prob(8, 1.0).unwrap()).abs() < 1e-15);
    }
}

//! Process classes from the growth of estimated complexity and facticity.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitcodec::BitString;
use crate::error::{domain, Error, Result};
use crate::estimator::estimate;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcessClass {
    InformationDiscarding,
    SelfOrganizing,
    Reversible,
    Random,
    Factic,
    Unclassified,
}

impl fmt::Display for ProcessClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProcessClass::InformationDiscarding => "information_discarding",
            ProcessClass::SelfOrganizing => "self_organizing",
            ProcessClass::Reversible => "reversible",
            ProcessClass::Random => "random",
            ProcessClass::Factic => "factic",
            ProcessClass::Unclassified => "unclassified",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub t: usize,
    pub k2_hat: u64,
    pub phi_hat: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProcessReport<T> {
    pub series: Vec<SeriesPoint>,
    pub slope_k: T,
    pub slope_phi: T,
    pub eta: T,
    pub class: ProcessClass,
}

/// Sign with a dead band: 0 iff `|z| <= eta`.
fn sign_eta<T: Scalar>(z: T, eta: T) -> i8 {
    if z.abs() <= eta {
        0
    } else if z > T::zero() {
        1
    } else {
        -1
    }
}

/// Maps the pair of growth signs to a class. Complexity falling with facticity
/// not falling is self-organizing; complexity rising with facticity not rising
/// is random; a flat complexity with moving facticity is unclassified.
pub fn classify<T: Scalar>(slope_k: T, slope_phi: T, eta: T) -> ProcessClass {
    match (sign_eta(slope_k, eta), sign_eta(slope_phi, eta)) {
        (-1, -1) => ProcessClass::InformationDiscarding,
        (-1, _) => ProcessClass::SelfOrganizing,
        (0, 0) => ProcessClass::Reversible,
        (1, 1) => ProcessClass::Factic,
        (1, _) => ProcessClass::Random,
        _ => ProcessClass::Unclassified,
    }
}

/// Least-squares slope of `ys` against `t = 0, 1, ...`.
pub fn ols_slope<T: Scalar>(ys: &[T]) -> T {
    let n = T::count(ys.len() as u64);
    let t_mean = (n - T::one()) / T::lit(2.0);
    let y_mean = ys.iter().fold(T::zero(), |a, &y| a + y) / n;
    let (mut sxy, mut sxx) = (T::zero(), T::zero());
    for (t, &y) in ys.iter().enumerate() {
        let dt = T::count(t as u64) - t_mean;
        sxy = sxy + dt * (y - y_mean);
        sxx = sxx + dt * dt;
    }
    if sxx == T::zero() {
        T::zero()
    } else {
        sxy / sxx
    }
}

/// Dead band used when none is given: `0.01 * mean(K2) / |xs|`.
pub fn default_eta<T: Scalar>(series: &[SeriesPoint]) -> T {
    let n = T::count(series.len() as u64);
    let mean = series.iter().fold(T::zero(), |a, p| a + T::count(p.k2_hat)) / n;
    T::lit(0.01) * mean / n
}

pub fn series_report<T: Scalar>(xs: &[BitString], eta: Option<T>) -> Result<ProcessReport<T>> {
    if xs.len() < 3 {
        return Err(Error::TooShort(xs.len()));
    }
    if let Some(e) = eta {
        if e.is_nan() || e < T::zero() {
            return Err(domain(format!("dead band eta must be >= 0, got {e}")));
        }
    }
    let series = xs
        .par_iter()
        .enumerate()
        .map(|(t, x)| {
            let r = estimate::<T>(x)?;
            Ok(SeriesPoint {
                t,
                k2_hat: r.k2,
                phi_hat: r.phi,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let ks: Vec<T> = series.iter().map(|p| T::count(p.k2_hat)).collect();
    let phis: Vec<T> = series.iter().map(|p| T::count(p.phi_hat)).collect();
    let slope_k = ols_slope(&ks);
    let slope_phi = ols_slope(&phis);
    let eta = eta.unwrap_or_else(|| default_eta(&series));
    Ok(ProcessReport {
        class: classify(slope_k, slope_phi, eta),
        series,
        slope_k,
        slope_phi,
        eta,
    })
}

/// Seeded generators for the five process shapes.
pub mod fixtures {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use crate::bitcodec::BitString;
    use crate::estimator::bernoulli_bits;

    fn uniform(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
        (0..n).map(|_| rng.gen()).collect()
    }

    /// The same 1024-bit random string, 20 times.
    pub fn repeated(seed: u64) -> Vec<BitString> {
        let x = bernoulli_bits(1024, 0.5, seed);
        vec![x; 20]
    }

    /// Prefixes of 256, 512, ... bits of one random string.
    pub fn growing_random_prefixes(seed: u64) -> Vec<BitString> {
        let steps = 16;
        let x = bernoulli_bits(256 * steps, 0.5, seed);
        (1..=steps).map(|t| x.slice(0, 256 * t)).collect()
    }

    /// Output of an order-`m` binary Markov source whose every context
    /// emits a one with probability `skew` or `1 - skew` (chosen at random).
    pub fn markov_source(n: usize, order: u32, skew: f64, rng: &mut ChaCha8Rng) -> BitString {
        let contexts = 1usize << order;
        let table: Vec<f64> = (0..contexts)
            .map(|_| if rng.gen::<bool>() { skew } else { 1.0 - skew })
            .collect();
        let mask = contexts - 1;
        let mut ctx = rng.gen_range(0..contexts);
        (0..n)
            .map(|_| {
                let b = rng.gen::<f64>() < table[ctx];
                ctx = ((ctx << 1) | b as usize) & mask;
                b
            })
            .collect()
    }

    /// Fixed-length strings from Markov sources of decreasing order
    /// (8 down to 1): the structure and the total description both shrink.
    pub fn decaying_structure(seed: u64) -> Vec<BitString> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (1..=8u32)
            .rev()
            .map(|m| markov_source(4096, m, 0.03, &mut rng))
            .collect()
    }

    /// Fixed-length strings whose periodic prefix grows step by step while the
    /// random remainder shrinks.
    pub fn progressive_periodization(seed: u64) -> Vec<BitString> {
        let n = 4096;
        let steps = 12;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let period: Vec<bool> = uniform(&mut rng, 5);
        let noise = uniform(&mut rng, n);
        (0..steps)
            .map(|t| {
                let cut = n * t / (steps - 1);
                (0..n)
                    .map(|j| if j < cut { period[j % 5] } else { noise[j] })
                    .collect()
            })
            .collect()
    }

    /// Accretes one periodic block per step, each with its own random pattern.
    pub fn accreting_periodic_blocks(seed: u64) -> Vec<BitString> {
        let block = 512;
        let steps = 12;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut acc = BitString::new();
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            let period_len = rng.gen_range(3..=7);
            let pattern = uniform(&mut rng, period_len);
            acc.extend_from(&(0..block).map(|j| pattern[j % period_len]).collect());
            out.push(acc.clone());
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        assert_eq!(classify(1.0, 0.5, 0.1), ProcessClass::Factic);
        assert_eq!(classify(0.05, 0.0, 0.1), ProcessClass::Reversible);
        assert_eq!(classify(0.0, 0.5, 0.1), ProcessClass::Unclassified);
        assert_eq!(classify(0.0, -0.5, 0.1), ProcessClass::Unclassified);
        assert_eq!(
            classify(-1.0, -1.0, 0.1),
            ProcessClass::InformationDiscarding
        );
        assert_eq!(classify(-1.0, 0.0, 0.1), ProcessClass::SelfOrganizing);
        assert_eq!(classify(-1.0, 2.0, 0.1), ProcessClass::SelfOrganizing);
        assert_eq!(classify(1.0, 0.0, 0.1), ProcessClass::Random);
        assert_eq!(classify(1.0, -3.0, 0.1), ProcessClass::Random);
    }

    #[test]
    fn classify_is_scale_free() {
        let vals = [-2.0, -0.1, 0.0, 0.1, 2.0];
        for &k in &vals {
            for &p in &vals {
                for &a in &[0.5, 3.0, 1e3] {
                    assert_eq!(classify(k, p, 0.1), classify(a * k, a * p, a * 0.1));
                }
            }
        }
    }

    #[test]
    fn ols_slope_values() {
        assert_eq!(ols_slope(&[1.0, 3.0, 5.0, 7.0]), 2.0);
        assert_eq!(ols_slope(&[4.0, 4.0, 4.0]), 0.0);
        assert!((ols_slope(&[3.0f64, 1.0, 2.0]) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn too_short_and_bad_eta() {
        let x = BitString::repeat(true, 64);
        assert!(matches!(
            series_report::<f64>(&[x.clone(), x.clone()], None),
            Err(Error::TooShort(2))
        ));
        assert!(series_report::<f64>(&[x.clone(), x.clone(), x], Some(-1.0)).is_err());
    }

    #[test]
    fn repeated_string_is_reversible() {
        let xs = fixtures::repeated(1);
        let r = series_report::<f64>(&xs, None).unwrap();
        assert_eq!(r.class, ProcessClass::Reversible);
        assert_eq!(r.slope_k, 0.0);
        let r0 = series_report::<f64>(&xs, Some(0.0)).unwrap();
        assert_eq!(r0.class, ProcessClass::Reversible);
    }

    #[test]
    fn growing_prefixes_are_random() {
        let r = series_report::<f64>(&fixtures::growing_random_prefixes(2), None).unwrap();
        assert_eq!(r.class, ProcessClass::Random);
        assert!((r.slope_k - 256.0).abs() < 5.0);
        assert_eq!(r.slope_phi, 0.0);
    }
}

use std::collections::HashMap;

use facticity::bitcodec::BitString;
use facticity::estimator::{
    bernoulli_bits, best_candidate, estimate, gen_stochastic, model_costs, normalized_facticity,
    sweep, ModelCandidate, ModelId, StochasticSpec,
};
use proptest::prelude::*;
use statrs::function::factorial::ln_binomial;

fn bits(x: &BitString) -> Vec<u8> {
    x.bits().iter().map(|&b| b as u8).collect()
}

/// Conditional code length of an order-`m` context model, recomputed from
/// explicit context strings.
fn markov_data_oracle(x: &BitString, m: usize) -> f64 {
    let v = bits(x);
    let mut counts: HashMap<&[u8], (u64, u64)> = HashMap::new();
    for j in m..v.len() {
        let c = counts.entry(&v[j - m..j]).or_default();
        if v[j] == 1 {
            c.1 += 1
        } else {
            c.0 += 1
        }
    }
    let mut total = m.min(v.len()) as f64;
    for &(zeros, ones) in counts.values() {
        let p = (ones as f64 + 0.5) / ((zeros + ones) as f64 + 1.0);
        let q = ((p * 256.0).round().clamp(1.0, 255.0)) / 256.0;
        total -= ones as f64 * q.log2() + zeros as f64 * (1.0 - q).log2();
    }
    total
}

fn candidate(cs: &[ModelCandidate<f64>], id: ModelId) -> ModelCandidate<f64> {
    *cs.iter().find(|c| c.id == id).unwrap()
}

#[test]
fn candidate_costs_match_direct_formulas() {
    for (n, p, seed) in [
        (4096, 0.11, 1u64),
        (2048, 0.5, 2),
        (333, 0.02, 3),
        (64, 0.3, 4),
    ] {
        let x = bernoulli_bits(n, p, seed);
        let cs = model_costs::<f64>(&x).unwrap();
        let ones = x.count_ones() as u64;

        let e = candidate(&cs, ModelId::Empty);
        assert_eq!((e.model_bits, e.data_bits), (0, n as f64));

        let b = candidate(&cs, ModelId::Bernoulli);
        let width = 64 - (n as u64).leading_zeros() as u64;
        let framed = width + 2 * (63 - (width + 1).leading_zeros() as u64) + 1;
        let count_bits = (n as f64 + 1.0).log2().ceil() as u64;
        assert_eq!(b.model_bits, framed + count_bits);
        let oracle = ln_binomial(n as u64, ones) / std::f64::consts::LN_2;
        assert!(
            (b.data_bits - oracle).abs() < 1e-6 * oracle.max(1.0),
            "n={n}"
        );

        let orders: Vec<u32> = cs
            .iter()
            .filter_map(|c| {
                if let ModelId::BlockMarkov(m) = c.id {
                    Some(m)
                } else {
                    None
                }
            })
            .collect();
        let expected: Vec<u32> = (1..=8)
            .filter(|&m| m as f64 <= (n as f64).log2() - 2.0)
            .collect();
        assert_eq!(orders, expected);
        for m in orders {
            let c = candidate(&cs, ModelId::BlockMarkov(m));
            assert_eq!(c.model_bits, 3 + framed + (1 << m) * 8);
            let oracle = markov_data_oracle(&x, m as usize);
            assert!(
                (c.data_bits - oracle).abs() < 1e-6,
                "m={m}: {} vs {oracle}",
                c.data_bits
            );
        }

        let s = candidate(&cs, ModelId::Singleton);
        assert!(s.total() > e.total());
    }
}

#[test]
fn all_zeros_uses_the_count_model() {
    let x = BitString::repeat(false, 4096);
    let cs = model_costs::<f64>(&x).unwrap();
    let b = candidate(&cs, ModelId::Bernoulli);
    assert_eq!(b.data_bits, 0.0);
    // 13-bit length in a 20-bit frame, then a 13-bit count
    assert_eq!(b.model_bits, 33);
    let r = estimate::<f64>(&x).unwrap();
    assert_eq!((r.k2, r.phi, r.delta), (33, 33, 4063));
    assert_eq!(r.model.as_deref(), Some("bernoulli"));
    assert!(r.estimated && !r.certified);
}

#[test]
fn random_string_keeps_the_empty_model() {
    let x = bernoulli_bits(4096, 0.5, 77);
    let r = estimate::<f64>(&x).unwrap();
    assert_eq!(r.phi, 0);
    assert_eq!(r.k2, 4096);
    assert_eq!(r.model.as_deref(), Some("empty"));
    assert_eq!(r.label.as_str(), "purely_stochastic");
}

#[test]
fn skewed_string_complexity_tracks_entropy() {
    let x = bernoulli_bits(4096, 0.11, 5);
    let r = estimate::<f64>(&x).unwrap();
    let ratio = r.k2 as f64 / 4096.0;
    assert!((ratio - 0.51).abs() <= 0.03, "K2/n = {ratio}");
}

#[test]
fn markov_source_prefers_context_model() {
    // a period-3 pattern with sparse flips is cheap for order 2 and up
    let pattern = [true, true, false];
    let flips = bernoulli_bits(4096, 0.01, 6);
    let x: BitString = (0..4096)
        .map(|j| pattern[j % 3] ^ flips.bits()[j])
        .collect();
    let r = estimate::<f64>(&x).unwrap();
    assert!(
        r.model.as_deref().unwrap().starts_with("block_markov"),
        "{:?}",
        r.model
    );
    assert!(r.k2 < 1000);
}

#[test]
fn fair_coin_generator_is_balanced() {
    let x = gen_stochastic(&StochasticSpec::new(10_000, 1.0, 3).unwrap()).unwrap();
    let frac = x.count_ones() as f64 / 10_000.0;
    assert!((frac - 0.5).abs() <= 0.015);
    let zero = gen_stochastic(&StochasticSpec::new(100, 0.0, 3).unwrap()).unwrap();
    assert_eq!(zero, BitString::repeat(false, 100));
    assert!(StochasticSpec::new(0, 0.5, 1).is_err());
    assert!(StochasticSpec::new(8, 1.5, 1).is_err());
}

#[test]
fn normalized_facticity_shape() {
    let n = 100u64;
    let v: Vec<f64> = (0..=n)
        .map(|c| normalized_facticity(c, n).unwrap())
        .collect();
    assert_eq!(v[50], 1.0);
    assert_eq!((v[0], v[100]), (0.0, 0.0));
    for c in 0..=100 {
        assert!((v[c] - v[100 - c]).abs() < 1e-12);
    }
    for w in v.windows(3) {
        assert!(w[0] + w[2] <= 2.0 * w[1] + 1e-12);
    }
    assert!(normalized_facticity::<f64>(5, 4).is_err());
}

#[test]
fn sweep_endpoints() {
    let t = sweep::<f64>(8, 11, 5, 11).unwrap();
    assert_eq!(t.rows.len(), 55);
    for r in t.rows.iter().filter(|r| r.s == 0.0) {
        // framed 12-bit length plus a 12-bit count
        assert_eq!((r.phi_hat, r.k2_hat), (31, 31));
    }
    let top: Vec<_> = t.rows.iter().filter(|r| r.s == 1.0).collect();
    let zeros = top.iter().filter(|r| r.phi_hat == 0).count();
    assert!(zeros * 10 >= top.len() * 9);
    assert_eq!(t.rows, sweep::<f64>(8, 11, 5, 11).unwrap().rows);
    assert!(sweep::<f64>(1, 11, 5, 11).is_err());
    assert!(sweep::<f64>(13, 11, 5, 11).is_err());
}

proptest! {
    #[test]
    fn estimate_is_deterministic_and_bounded(v in proptest::collection::vec(any::<bool>(), 1..600)) {
        let x = BitString::from_bits(v);
        let a = estimate::<f64>(&x).unwrap();
        prop_assert_eq!(&a, &estimate::<f64>(&x).unwrap());
        prop_assert!(a.k2 <= x.len() as u64);
        prop_assert_eq!(a.phi == 0, a.model.as_deref() == Some("empty"));
        prop_assert!(a.rho >= 0);
    }

    #[test]
    fn extra_candidates_only_lower_the_minimum(v in proptest::collection::vec(any::<bool>(), 1..400)) {
        let x = BitString::from_bits(v);
        let cs = model_costs::<f64>(&x).unwrap();
        let all = best_candidate(&cs).unwrap().total();
        let base: Vec<_> = cs.iter().copied().filter(|c| c.id == ModelId::Empty).collect();
        prop_assert!(all <= best_candidate(&base).unwrap().total());
    }
}

//! Log-gamma and log-binomial helpers.

use crate::error::{domain, Result};
use crate::scalar::Scalar;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// `ln Γ(x)` for `x >= 0.5` (Lanczos, g = 7, nine terms).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    debug_assert!(x >= T::lit(0.5));
    let x = x - T::one();
    let mut a = T::lit(LANCZOS[0]);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        a = a + T::lit(c) / (x + T::count(i as u64));
    }
    let t = x + T::lit(LANCZOS_G + 0.5);
    T::lit(0.5) * (T::TAU()).ln() + (x + T::lit(0.5)) * t.ln() - t + a.ln()
}

/// `log2 C(n, m)` through log-gamma.
pub fn log2_binomial<T: Scalar>(n: u64, m: u64) -> Result<T> {
    if m > n {
        return Err(domain(format!("binomial C({n}, {m}) with m > n")));
    }
    if m == 0 || m == n {
        return Ok(T::zero());
    }
    let ln = ln_gamma(T::count(n + 1)) - ln_gamma(T::count(m + 1)) - ln_gamma(T::count(n - m + 1));
    Ok((ln * T::LOG2_E()).max(T::zero()))
}

//! Binary entropy, its inverse, and the principal branch of Lambert W.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// Entropy in bits per symbol, `0 <= s <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct EntropyValue<T>(T);

impl<T: Scalar> EntropyValue<T> {
    pub fn new(s: T) -> Result<Self> {
        if s >= T::zero() && s <= T::one() {
            Ok(Self(s))
        } else {
            Err(domain(format!("entropy {s} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

/// A probability in `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Probability<T>(T);

impl<T: Scalar> Probability<T> {
    pub fn new(p: T) -> Result<Self> {
        if p >= T::zero() && p <= T::one() {
            Ok(Self(p))
        } else {
            Err(domain(format!("probability {p} outside [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> T {
        self.0
    }
}

#[inline]
fn plogp<T: Scalar>(p: T) -> T {
    if p <= T::zero() {
        T::zero()
    } else {
        p * p.log2()
    }
}

/// `-p log2 p - (1-p) log2 (1-p)` with `0 log 0 = 0`.
pub fn binary_entropy<T: Scalar>(p: T) -> Result<T> {
    let p = Probability::new(p)?.get();
    Ok(entropy_unchecked(p))
}

#[inline]
pub(crate) fn entropy_unchecked<T: Scalar>(p: T) -> T {
    let h = -plogp(p) - plogp(T::one() - p);
    // rounding can leave a tiny negative at the endpoints
    h.max(T::zero()).min(T::one())
}

const BISECT_MAX_ITER: usize = 200;

/// Tolerance the bisection inverse guarantees on `|H(p) - s|` for `f64`.
pub const INVERSE_ENTROPY_TOL: f64 = 1e-9;

/// The unique `p` in `[0, 1/2]` with `H(p) = s`, by bisection on the increasing branch.
///
/// Runs until the bracket stops shrinking (or 200 halvings) and returns the endpoint
/// with the smaller residual, so the result is as tight as the float type allows.
pub fn inverse_entropy_bisect<T: Scalar>(s: T) -> Result<T> {
    let s = EntropyValue::new(s)?.get();
    if s == T::zero() {
        return Ok(T::zero());
    }
    if s == T::one() {
        return Ok(T::lit(0.5));
    }
    let mut lo = T::zero();
    let mut hi = T::lit(0.5);
    for _ in 0..BISECT_MAX_ITER {
        let mid = (lo + hi) * T::lit(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_unchecked(mid) < s {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let r_lo = (entropy_unchecked(lo) - s).abs();
    let r_hi = (entropy_unchecked(hi) - s).abs();
    Ok(if r_lo <= r_hi { lo } else { hi })
}

/// Principal branch `W0` of the Lambert W function: `w e^w = x`, `w >= -1`.
///
/// Halley iteration. Initial guess: the branch-point series
/// `-1 + q - q^2/3 + 11 q^3 / 72` with `q = sqrt(2(e x + 1))` for `x < -1/4`,
/// `ln(1 + x)` on `[-1/4, 3]`, and `ln x - ln ln x` beyond.
pub fn lambert_w0<T: Scalar>(x: T) -> Result<T> {
    let e = T::E();
    let branch = -e.recip();
    let eps = T::epsilon();
    if x.is_nan() || x < branch - T::lit(4.0) * eps {
        return Err(domain(format!("lambert_w0 argument {x} below -1/e")));
    }
    if x == T::zero() {
        return Ok(T::zero());
    }
    if x <= branch {
        return Ok(-T::one());
    }
    let mut w = if x < T::lit(-0.25) {
        let q = (T::lit(2.0) * (e * x + T::one())).max(T::zero()).sqrt();
        -T::one() + q - q * q / T::lit(3.0) + T::lit(11.0 / 72.0) * q * q * q
    } else if x <= T::lit(3.0) {
        x.ln_1p()
    } else {
        let l = x.ln();
        l - l.ln()
    };
    for _ in 0..64 {
        let ew = w.exp();
        let f = w * ew - x;
        if f == T::zero() {
            break;
        }
        let wp1 = w + T::one();
        let denom = ew * wp1 - (w + T::lit(2.0)) * f / (T::lit(2.0) * wp1);
        if denom == T::zero() || !denom.is_finite() {
            break;
        }
        let step = f / denom;
        w = w - step;
        if step.abs() <= T::lit(4.0) * eps * (T::one() + w.abs()) {
            break;
        }
    }
    Ok(w)
}

/// `u / W0(u)`, continued by its limit 1 at `u = 0`.
fn ratio_over_w<T: Scalar>(u: T) -> Result<T> {
    if u == T::zero() {
        return Ok(T::one());
    }
    Ok(u / lambert_w0(u)?)
}

/// Literal evaluation of `-s/W(s) - (1-s)/W(1-s)` with principal-branch `W`.
///
/// Returns the value and whether `1 - value` lands in `[0, 1/2]`. Kept as a
/// diagnostic: the principal branch does not produce a probability here, and
/// everything downstream uses [`inverse_entropy_bisect`].
pub fn inverse_entropy_productlog<T: Scalar>(s: T) -> Result<(T, bool)> {
    if s.is_nan() || s <= T::zero() || s > T::one() {
        return Err(domain(format!(
            "product-log inverse needs 0 < s <= 1, got {s}"
        )));
    }
    let value = -ratio_over_w(s)? - ratio_over_w(T::one() - s)?;
    let p = T::one() - value;
    Ok((value, p >= T::zero() && p <= T::lit(0.5)))
}

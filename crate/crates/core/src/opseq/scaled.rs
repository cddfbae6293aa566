//! Floating point numbers with an unbounded binary exponent.
//!
//! The polynomial sequences evaluated here grow like `n!` and their ratios to
//! the minimal solution shrink just as fast, so a few hundred recurrence steps
//! leave the `f64` range. A [`ScaledReal`] keeps a signed mantissa in `[1, 2)`
//! next to an `i64` exponent and renormalizes after every operation.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// Operands further apart than this many binaries are not aligned; the
/// smaller one is below half an ulp of the larger.
const ALIGN_LIMIT: i64 = 60;

const EXP_MASK: u64 = 0x7ff << 52;
const TWO_POW_64: f64 = 18446744073709551616.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledReal {
    /// Signed mantissa, `|mantissa|` in `[1, 2)`; exactly 0 for zero.
    mantissa: f64,
    exponent: i64,
}

/// `2^k` for `k` inside the normal range.
#[inline]
fn pow2(k: i64) -> f64 {
    debug_assert!((-1022..=1023).contains(&k));
    f64::from_bits(((k + 1023) as u64) << 52)
}

/// `v * 2^k` without intermediate overflow; saturates to `inf` or `0`.
pub fn ldexp(v: f64, k: i64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let mut v = v;
    let mut k = k;
    while k > 1000 {
        v *= pow2(1000);
        k -= 1000;
        if v.is_infinite() {
            return v;
        }
    }
    while k < -1000 {
        v *= pow2(-1000);
        k += 1000;
        if v == 0.0 {
            return v;
        }
    }
    v * pow2(k)
}

/// Split a finite nonzero `v` into `(m, e)` with `|m|` in `[1, 2)`.
#[inline]
fn split(v: f64) -> (f64, i64) {
    let bits = v.to_bits();
    let raw = ((bits & EXP_MASK) >> 52) as i64;
    if raw == 0 {
        // subnormal: lift into the normal range first
        let (m, e) = split(v * TWO_POW_64);
        return (m, e - 64);
    }
    let m = f64::from_bits((bits & !EXP_MASK) | (1023u64 << 52));
    (m, raw - 1023)
}

impl ScaledReal {
    pub const ZERO: ScaledReal = ScaledReal {
        mantissa: 0.0,
        exponent: 0,
    };
    pub const ONE: ScaledReal = ScaledReal {
        mantissa: 1.0,
        exponent: 0,
    };

    /// Builds `mantissa * 2^exponent` and renormalizes. Non-finite mantissas
    /// are kept as they are so that failures propagate visibly.
    #[inline]
    pub fn from_parts(mantissa: f64, exponent: i64) -> Self {
        if mantissa == 0.0 {
            return ScaledReal::ZERO;
        }
        if !mantissa.is_finite() {
            return ScaledReal {
                mantissa,
                exponent: 0,
            };
        }
        let (m, e) = split(mantissa);
        ScaledReal {
            mantissa: m,
            exponent: exponent + e,
        }
    }

    #[inline]
    pub fn from_f64(v: f64) -> Self {
        ScaledReal::from_parts(v, 0)
    }

    pub fn mantissa(&self) -> f64 {
        self.mantissa
    }

    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    /// -1, 0 or +1.
    #[inline]
    pub fn signum(&self) -> i32 {
        if self.mantissa > 0.0 {
            1
        } else if self.mantissa < 0.0 {
            -1
        } else {
            0
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.mantissa == 0.0
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.is_finite()
    }

    pub fn abs(&self) -> Self {
        ScaledReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
        }
    }

    /// Nearest `f64`; `±inf` or `±0` outside the representable range.
    pub fn to_f64(&self) -> f64 {
        ldexp(self.mantissa, self.exponent)
    }

    /// `log2 |self|`, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().log2() + self.exponent as f64
        }
    }

    pub fn log10_abs(&self) -> f64 {
        self.log2_abs() * std::f64::consts::LOG10_2
    }

    /// `self / other` as a plain `f64` (saturating).
    pub fn ratio(&self, other: &ScaledReal) -> f64 {
        ldexp(self.mantissa / other.mantissa, self.exponent - other.exponent)
    }

    pub fn mul_f64(self, v: f64) -> Self {
        ScaledReal::from_parts(self.mantissa * v, self.exponent)
    }

    pub fn scale_pow2(self, k: i64) -> Self {
        if self.is_zero() {
            self
        } else {
            ScaledReal {
                mantissa: self.mantissa,
                exponent: self.exponent + k,
            }
        }
    }

    fn cmp_abs(&self, other: &ScaledReal) -> Ordering {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => Ordering::Equal,
            (true, false) => Ordering::Less,
            (false, true) => Ordering::Greater,
            (false, false) => self
                .exponent
                .cmp(&other.exponent)
                .then_with(|| self.mantissa.abs().total_cmp(&other.mantissa.abs())),
        }
    }
}

impl Default for ScaledReal {
    fn default() -> Self {
        ScaledReal::ZERO
    }
}

impl From<f64> for ScaledReal {
    fn from(v: f64) -> Self {
        ScaledReal::from_f64(v)
    }
}

impl PartialOrd for ScaledReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if !self.is_finite() || !other.is_finite() {
            return self.to_f64().partial_cmp(&other.to_f64());
        }
        let (a, b) = (self.signum(), other.signum());
        if a != b {
            return Some(a.cmp(&b));
        }
        let mag = self.cmp_abs(other);
        Some(if a < 0 { mag.reverse() } else { mag })
    }
}

impl Add for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn add(self, rhs: ScaledReal) -> ScaledReal {
        if rhs.is_zero() {
            return self;
        }
        if self.is_zero() {
            return rhs;
        }
        let gap = self.exponent - rhs.exponent;
        if gap > ALIGN_LIMIT {
            self
        } else if gap < -ALIGN_LIMIT {
            rhs
        } else if gap >= 0 {
            ScaledReal::from_parts(self.mantissa + rhs.mantissa * pow2(-gap), self.exponent)
        } else {
            ScaledReal::from_parts(self.mantissa * pow2(gap) + rhs.mantissa, rhs.exponent)
        }
    }
}

impl Neg for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn neg(self) -> ScaledReal {
        ScaledReal {
            mantissa: -self.mantissa,
            exponent: self.exponent,
        }
    }
}

impl Sub for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn sub(self, rhs: ScaledReal) -> ScaledReal {
        self + (-rhs)
    }
}

impl Mul for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn mul(self, rhs: ScaledReal) -> ScaledReal {
        ScaledReal::from_parts(self.mantissa * rhs.mantissa, self.exponent + rhs.exponent)
    }
}

impl Mul<f64> for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn mul(self, rhs: f64) -> ScaledReal {
        self.mul_f64(rhs)
    }
}

impl Div for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn div(self, rhs: ScaledReal) -> ScaledReal {
        ScaledReal::from_parts(self.mantissa / rhs.mantissa, self.exponent - rhs.exponent)
    }
}

impl Div<f64> for ScaledReal {
    type Output = ScaledReal;

    #[inline]
    fn div(self, rhs: f64) -> ScaledReal {
        ScaledReal::from_parts(self.mantissa / rhs, self.exponent)
    }
}

impl fmt::Display for ScaledReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() || !self.is_finite() {
            return write!(f, "{}", self.mantissa);
        }
        // decimal mantissa/exponent so huge values stay readable
        let l10 = self.log10_abs();
        let e10 = l10.floor();
        let m10 = 10f64.powf(l10 - e10) * self.signum() as f64;
        write!(f, "{m10:.15}e{e10}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization() {
        let v = ScaledReal::from_f64(-6.0);
        assert_eq!(v.mantissa(), -1.5);
        assert_eq!(v.exponent(), 2);
        assert_eq!(v.to_f64(), -6.0);
        assert_eq!(ScaledReal::from_f64(0.0), ScaledReal::ZERO);
        assert_eq!(ScaledReal::from_f64(0.0).signum(), 0);
    }

    #[test]
    fn subnormals_split_exactly() {
        let tiny = f64::from_bits(3);
        let v = ScaledReal::from_f64(tiny);
        assert!(v.mantissa() >= 1.0 && v.mantissa() < 2.0);
        assert_eq!(v.to_f64(), tiny);
    }

    #[test]
    fn far_beyond_f64_range() {
        let mut v = ScaledReal::ONE;
        for k in 1..=400 {
            v = v * (k as f64);
        }
        // log10(400!) = 868.8064...
        assert!((v.log10_abs() - 868.806_414_177_7).abs() < 1e-9);
        assert_eq!(v.to_f64(), f64::INFINITY);
        let w = v / v;
        assert_eq!(w.to_f64(), 1.0);
        assert_eq!(v.ratio(&(v * 2.0)), 0.5);
    }

    #[test]
    fn wide_gap_returns_larger_operand() {
        let big = ScaledReal::from_parts(1.25, 100);
        let small = ScaledReal::from_parts(1.75, 100 - 61);
        assert_eq!(big + small, big);
        assert_eq!(small + big, big);
        let near = ScaledReal::from_parts(1.0, 100 - 52);
        assert!(big + near != big);
    }

    #[test]
    fn ordering_across_signs_and_scales() {
        let a = ScaledReal::from_parts(-1.5, 3000);
        let b = ScaledReal::from_parts(-1.5, 2000);
        let c = ScaledReal::from_parts(1.1, -5000);
        assert!(a < b);
        assert!(b < ScaledReal::ZERO);
        assert!(ScaledReal::ZERO < c);
        assert!(c < ScaledReal::ONE);
    }

    #[test]
    fn ldexp_saturates() {
        assert_eq!(ldexp(1.0, 5000), f64::INFINITY);
        assert_eq!(ldexp(-1.0, -5000), -0.0);
        assert_eq!(ldexp(1.0, -1074), f64::from_bits(1));
        assert_eq!(ldexp(3.0, -1), 1.5);
    }

    proptest! {
        #[test]
        fn arithmetic_matches_f64_in_range(a in -1e100f64..1e100, b in -1e100f64..1e100) {
            let (sa, sb) = (ScaledReal::from_f64(a), ScaledReal::from_f64(b));
            let tol = |r: f64, scale: f64| (r.abs().max(scale)) * 4.0 * f64::EPSILON;
            prop_assert!(((sa * sb).to_f64() - a * b).abs() <= tol(a * b, 0.0));
            prop_assert!(((sa + sb).to_f64() - (a + b)).abs() <= tol(a + b, a.abs().max(b.abs())));
            prop_assert!(((sa - sb).to_f64() - (a - b)).abs() <= tol(a - b, a.abs().max(b.abs())));
            if b != 0.0 {
                prop_assert!(((sa / sb).to_f64() - a / b).abs() <= tol(a / b, 0.0));
            }
            prop_assert_eq!(sa.partial_cmp(&sb), a.partial_cmp(&b));
        }

        #[test]
        fn product_keeps_fifteen_digits(a in 1.0f64..2.0, ea in -100_000i64..100_000, b in 1.0f64..2.0, eb in -100_000i64..100_000) {
            let p = ScaledReal::from_parts(a, ea) * ScaledReal::from_parts(b, eb);
            let expect = (a * b).log2() + (ea + eb) as f64;
            prop_assert!((p.log2_abs() - expect).abs() < 1e-15 * expect.abs().max(1.0));
        }
    }
}

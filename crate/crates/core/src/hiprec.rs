//! 124-fraction-bit reference arithmetic.
//!
//! [`Wide`] is an unsigned fixed-point real with 124 fraction bits held in a
//! `u128`, so it covers `[0, 8)` with an absolute resolution of `2^-124`. It
//! is only used to produce reference values (LUT constants and error oracles)
//! and is deliberately unrelated to the datapath arithmetic it checks.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

pub const WIDE_FRAC: u32 = 124;

/// `ln 2` truncated to 124 fraction bits.
const LN2_RAW: u128 = 0xb17217f7d1cf79abc9e3b39803f2f6a;

/// Argument halvings before the Taylor sum in [`exp_neg_reduced`].
const HALVINGS: u32 = 10;
const TAYLOR_TERMS: u32 = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Wide(u128);

/// 128x128 -> 256-bit product as (hi, lo).
fn widening_mul(a: u128, b: u128) -> (u128, u128) {
    let mask = u64::MAX as u128;
    let (a1, a0) = (a >> 64, a & mask);
    let (b1, b0) = (b >> 64, b & mask);
    let p00 = a0 * b0;
    let p01 = a0 * b1;
    let p10 = a1 * b0;
    let p11 = a1 * b1;
    let mid = (p00 >> 64) + (p01 & mask) + (p10 & mask);
    let lo = (p00 & mask) | (mid << 64);
    let hi = p11 + (p01 >> 64) + (p10 >> 64) + (mid >> 64);
    (hi, lo)
}

// Rounding and overflow semantics differ from the operator traits.
#[allow(clippy::should_implement_trait)]
impl Wide {
    pub const ZERO: Wide = Wide(0);
    pub const ONE: Wide = Wide(1 << WIDE_FRAC);
    pub const LN2: Wide = Wide(LN2_RAW);

    pub fn from_raw(raw: u128) -> Self {
        assert!(raw >> 127 == 0, "Wide values must stay below 8");
        Wide(raw)
    }

    pub fn raw(self) -> u128 {
        self.0
    }

    /// Exact conversion of `raw * 2^-frac_bits`; bits below `2^-124` are
    /// truncated. Returns `None` when the value is 8 or more.
    pub fn from_dyadic(raw: u128, frac_bits: u32) -> Option<Self> {
        let v = if frac_bits >= WIDE_FRAC {
            let s = frac_bits - WIDE_FRAC;
            if s >= 128 {
                0
            } else {
                raw >> s
            }
        } else {
            let s = WIDE_FRAC - frac_bits;
            if raw != 0 && raw.leading_zeros() <= s {
                return None;
            }
            raw << s
        };
        (v >> 127 == 0).then_some(Wide(v))
    }

    pub fn from_u32(n: u32) -> Option<Self> {
        Self::from_dyadic(n as u128, 0)
    }

    /// Truncating conversion from an exact rational in `[0, 8)`.
    pub fn from_rational(x: &BigRational) -> Option<Self> {
        if x.numer().sign() == num_bigint::Sign::Minus {
            return None;
        }
        let scaled = x.numer().magnitude() << WIDE_FRAC as usize;
        let q = scaled / x.denom().magnitude();
        let v = q.to_u128()?;
        (v >> 127 == 0).then_some(Wide(v))
    }

    pub fn to_rational(self) -> BigRational {
        BigRational::new(
            BigUint::from(self.0).into(),
            (BigUint::one() << WIDE_FRAC as usize).into(),
        )
    }

    pub fn to_f64(self) -> f64 {
        (self.0 as f64) * (-(WIDE_FRAC as f64)).exp2()
    }

    pub fn checked_add(self, o: Wide) -> Option<Wide> {
        self.0.checked_add(o.0).filter(|v| v >> 127 == 0).map(Wide)
    }

    pub fn checked_sub(self, o: Wide) -> Option<Wide> {
        self.0.checked_sub(o.0).map(Wide)
    }

    pub fn abs_diff(self, o: Wide) -> Wide {
        Wide(self.0.abs_diff(o.0))
    }

    /// Product rounded to nearest.
    pub fn mul(self, o: Wide) -> Wide {
        let (hi, lo) = widening_mul(self.0, o.0);
        let round = (lo >> (WIDE_FRAC - 1)) & 1;
        let v = (hi << (128 - WIDE_FRAC)) | (lo >> WIDE_FRAC);
        assert!(
            hi >> (2 * WIDE_FRAC - 128 + 3) == 0,
            "Wide product overflow"
        );
        Wide::from_raw(v + round)
    }

    /// Quotient truncated toward zero. `None` on division by zero or overflow.
    pub fn div(self, o: Wide) -> Option<Wide> {
        if o.0 == 0 {
            return None;
        }
        let (mut q, mut r) = self.0.div_rem(&o.0);
        if q >> 3 != 0 {
            return None;
        }
        // Restoring long division over the 124 fraction bits; r < o < 2^127.
        for _ in 0..WIDE_FRAC {
            r <<= 1;
            q <<= 1;
            if r >= o.0 {
                r -= o.0;
                q |= 1;
            }
        }
        Some(Wide(q))
    }

    /// Quotient by a positive integer, truncated toward zero.
    pub fn div_int(self, n: u32) -> Wide {
        assert!(n != 0, "division by zero");
        Wide(self.0 / n as u128)
    }

    pub fn shr(self, k: u32) -> Wide {
        Wide(if k >= 128 { 0 } else { self.0 >> k })
    }

    /// Truncates onto a `2^-frac_bits` grid, returning the raw integer.
    pub fn floor_raw(self, frac_bits: u32) -> u128 {
        assert!(frac_bits <= WIDE_FRAC);
        self.0 >> (WIDE_FRAC - frac_bits)
    }

    /// Rounds to nearest (ties to even) onto a `2^-frac_bits` grid.
    pub fn round_raw(self, frac_bits: u32) -> u128 {
        assert!(frac_bits <= WIDE_FRAC);
        let s = WIDE_FRAC - frac_bits;
        if s == 0 {
            return self.0;
        }
        let kept = self.0 >> s;
        let rem = self.0 & ((1u128 << s) - 1);
        let half = 1u128 << (s - 1);
        match rem.cmp(&half) {
            Ordering::Greater => kept + 1,
            Ordering::Equal if kept & 1 == 1 => kept + 1,
            _ => kept,
        }
    }

    /// `floor(-log2(self))`, the number of leading fraction bits an error of
    /// this size never disturbs. `None` for zero.
    pub fn neg_log2_floor(self) -> Option<i32> {
        if self.0 == 0 {
            return None;
        }
        // self = raw * 2^-124; -log2 = 124 - log2(raw); floor of that is
        // 124 - ceil(log2(raw)).
        let ceil_log2 = if self.0 == 1 {
            0
        } else {
            128 - (self.0 - 1).leading_zeros()
        };
        Some(WIDE_FRAC as i32 - ceil_log2 as i32)
    }
}

/// `e^-r` for `0 <= r < 1`, accurate to a few units of `2^-114`.
fn exp_neg_reduced(r: Wide) -> Wide {
    debug_assert!(r < Wide::ONE);
    let y = r.shr(HALVINGS);
    // Alternating series: accumulate even and odd terms separately.
    let mut even = Wide::ONE;
    let mut odd = Wide::ZERO;
    let mut term = Wide::ONE;
    for n in 1..=TAYLOR_TERMS {
        term = term.mul(y).div_int(n);
        if n % 2 == 0 {
            even = even.checked_add(term).unwrap();
        } else {
            odd = odd.checked_add(term).unwrap();
        }
    }
    let mut v = even.checked_sub(odd).unwrap();
    for _ in 0..HALVINGS {
        v = v.mul(v);
    }
    v
}

/// `e^-a` as a normalized mantissa and a binary exponent.
///
/// The value is `mantissa * 2^-exp2` with `mantissa` in `(0.5, 1]`. Range
/// reduction by `ln 2` costs `k * 2^-124` of relative error for `k` halvings,
/// so the result is good to about `2^-100` for arguments below `2^20` and to
/// `2^-60` for any argument whose integer part fits in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScaledWide {
    pub mantissa: Wide,
    pub exp2: u64,
}

impl ScaledWide {
    /// Fixed-point view; contributions below `2^-124` are truncated.
    pub fn to_wide(self) -> Wide {
        if self.exp2 >= 128 {
            Wide::ZERO
        } else {
            self.mantissa.shr(self.exp2 as u32)
        }
    }

    pub fn to_f64(self) -> f64 {
        self.mantissa.to_f64() * (-(self.exp2 as f64)).exp2()
    }

    pub fn to_rational(self) -> BigRational {
        self.mantissa.to_rational()
            / BigRational::from_integer((BigUint::one() << self.exp2 as usize).into())
    }
}

/// `e^-a` for an argument given as `floor(a * 2^124)` in arbitrary precision.
fn exp_neg_scaled_big(a_scaled: &BigUint) -> ScaledWide {
    let ln2 = BigUint::from(LN2_RAW);
    let (k, r) = a_scaled.div_rem(&ln2);
    let k = k.to_u64().expect("argument integer part exceeds 64 bits");
    let r = Wide(r.to_u128().expect("remainder below ln 2"));
    ScaledWide {
        mantissa: exp_neg_reduced(r),
        exp2: k,
    }
}

fn exp_neg_scaled_small(a_scaled: u128) -> ScaledWide {
    let k = a_scaled / LN2_RAW;
    let r = a_scaled % LN2_RAW;
    ScaledWide {
        mantissa: exp_neg_reduced(Wide(r)),
        exp2: k as u64,
    }
}

/// `e^-a` for the dyadic argument `raw * 2^-frac_bits`.
pub fn exp_neg_dyadic(raw: u128, frac_bits: u32) -> ScaledWide {
    match Wide::from_dyadic(raw, frac_bits) {
        Some(a) => exp_neg_scaled_small(a.0),
        None => {
            let big = BigUint::from(raw);
            let scaled = if frac_bits >= WIDE_FRAC {
                big >> (frac_bits - WIDE_FRAC) as usize
            } else {
                big << (WIDE_FRAC - frac_bits) as usize
            };
            exp_neg_scaled_big(&scaled)
        }
    }
}

/// `e^-a` for an exact non-negative rational argument.
pub fn exp_neg_rational(a: &BigRational) -> ScaledWide {
    assert!(
        a.numer().sign() != num_bigint::Sign::Minus,
        "argument must be non-negative"
    );
    let scaled = (a.numer().magnitude() << WIDE_FRAC as usize) / a.denom().magnitude();
    if scaled.is_zero() {
        return ScaledWide {
            mantissa: Wide::ONE,
            exp2: 0,
        };
    }
    match scaled.to_u128().filter(|v| v >> 127 == 0) {
        Some(v) => exp_neg_scaled_small(v),
        None => exp_neg_scaled_big(&scaled),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Reference digits computed independently at 200-bit precision.
    const EXP_NEG_ONE_RAW: u128 = 0x5e2d58d8b3bcdf1abadec7829054f90;
    const EXP_NEG_ONE_DEC: f64 = 0.367_879_441_171_442_33;

    fn close(a: Wide, b: Wide, ulps: u128) -> bool {
        a.abs_diff(b).raw() <= ulps
    }

    #[test]
    fn widening_mul_matches_bigint() {
        let vals = [
            0u128,
            1,
            u64::MAX as u128,
            u128::MAX,
            0x1234_5678_9abc_def0_1122_3344_5566_7788,
        ];
        for &a in &vals {
            for &b in &vals {
                let (hi, lo) = widening_mul(a, b);
                let want = BigUint::from(a) * BigUint::from(b);
                let got = (BigUint::from(hi) << 128usize) + BigUint::from(lo);
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn exp_of_zero_is_one() {
        let v = exp_neg_dyadic(0, 16);
        assert_eq!(v.to_wide(), Wide::ONE);
    }

    #[test]
    fn exp_of_one_matches_reference() {
        let v = exp_neg_dyadic(1, 0).to_wide();
        assert!(close(v, Wide(EXP_NEG_ONE_RAW), 1 << 12), "{:#x}", v.raw());
        assert_eq!(v.to_f64(), EXP_NEG_ONE_DEC);
    }

    #[test]
    fn exp_of_ln2_is_half() {
        let v = exp_neg_dyadic(LN2_RAW, WIDE_FRAC).to_wide();
        assert!(close(v, Wide::ONE.shr(1), 1 << 12));
    }

    #[test]
    fn large_arguments_keep_relative_precision() {
        // e^-100 = 3.720075976020836e-44
        let v = exp_neg_dyadic(100, 0);
        let rel = (v.to_f64() / 3.720_075_976_020_836e-44 - 1.0).abs();
        assert!(rel < 1e-15, "{rel}");
        let big = exp_neg_rational(&BigRational::from_integer(100.into()));
        assert_eq!(big, v);
    }

    #[test]
    fn agrees_with_f64_exp_on_a_grid() {
        for k in 0..2000u128 {
            let a = k * 37;
            let v = exp_neg_dyadic(a, 10).to_f64();
            let want = (-(a as f64) / 1024.0).exp();
            assert!(((v - want) / want).abs() < 4e-16, "k={k}");
        }
    }

    #[test]
    fn division_and_rounding() {
        let third = Wide::ONE.div(Wide::from_u32(3).unwrap()).unwrap();
        let back = third.mul(Wide::from_u32(3).unwrap());
        assert!(close(back, Wide::ONE, 3));
        assert_eq!(Wide::ONE.div(Wide::ZERO), None);
        let x = Wide::from_dyadic(0b1011, 4).unwrap();
        assert_eq!(x.floor_raw(2), 0b10);
        assert_eq!(x.round_raw(2), 0b11);
        assert_eq!(Wide::from_dyadic(0b1010, 4).unwrap().round_raw(2), 0b10);
    }

    #[test]
    fn neg_log2_floor_brackets() {
        assert_eq!(Wide::ONE.neg_log2_floor(), Some(0));
        assert_eq!(Wide::ONE.shr(16).neg_log2_floor(), Some(16));
        let just_above = Wide(Wide::ONE.shr(16).raw() + 1);
        assert_eq!(just_above.neg_log2_floor(), Some(15));
        assert_eq!(Wide::ZERO.neg_log2_floor(), None);
    }
}

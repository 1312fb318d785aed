//! Unsigned fixed-point values with explicit per-value widths.
//!
//! A [`FixedUQ`] stores a raw integer magnitude together with the number of
//! integer and fraction bits it was declared with. The represented value is
//! `raw * 2^-frac_bits`. Widths travel with every value, so datapaths whose
//! stages use different word lengths can be modelled directly.
//!
//! The primitives here follow hardware semantics: multiplication keeps the
//! full double-width product and then drops low bits, shifts lose whatever
//! falls off the bottom, and `1 - a` comes in an exact (2's complement) and a
//! bitwise-not (1's complement) flavour.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Widest raw magnitude a value may carry.
pub const MAX_WIDTH: u32 = 128;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixedError {
    #[error("invalid format u{int_bits}.{frac_bits}: total width must be in 1..={MAX_WIDTH}")]
    InvalidFormat { int_bits: u32, frac_bits: u32 },
    #[error("raw value {raw:#x} does not fit in u{int_bits}.{frac_bits}")]
    RawOutOfRange {
        raw: u128,
        int_bits: u32,
        frac_bits: u32,
    },
    #[error("value overflows u{int_bits}.{frac_bits} after rounding")]
    Overflow { int_bits: u32, frac_bits: u32 },
    #[error("negative value cannot be represented")]
    Negative,
    #[error("operand must be a pure fraction (u0.W), got u{int_bits}.{frac_bits}")]
    NotPureFraction { int_bits: u32, frac_bits: u32 },
    #[error("operand exceeds 1.0")]
    GreaterThanOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RoundingMode {
    /// Drop bits below the target lsb (toward zero).
    #[default]
    Truncate,
    /// Round to nearest, ties to even.
    NearestEven,
}

/// Unsigned fixed-point number `u<int_bits>.<frac_bits>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FixedUQ {
    raw: u128,
    int_bits: u32,
    frac_bits: u32,
}

fn width_mask(width: u32) -> u128 {
    if width >= 128 {
        u128::MAX
    } else {
        (1u128 << width) - 1
    }
}

fn check_format(int_bits: u32, frac_bits: u32) -> Result<(), FixedError> {
    let width = int_bits.checked_add(frac_bits);
    match width {
        Some(w) if (1..=MAX_WIDTH).contains(&w) => Ok(()),
        _ => Err(FixedError::InvalidFormat {
            int_bits,
            frac_bits,
        }),
    }
}

/// Shifts `raw` (at `from` fraction bits) to `to` fraction bits.
///
/// Returns `None` when the rounded magnitude no longer fits in 128 bits.
pub(crate) fn rescale_raw(raw: u128, from: u32, to: u32, mode: RoundingMode) -> Option<u128> {
    if to >= from {
        let shift = to - from;
        if shift >= 128 {
            return if raw == 0 { Some(0) } else { None };
        }
        if raw != 0 && raw.leading_zeros() < shift {
            return None;
        }
        return Some(raw << shift);
    }
    let shift = from - to;
    if shift >= 128 {
        // Everything is below half an lsb except possibly at exactly 128.
        let half_or_more = shift == 128 && raw >> 127 == 1;
        let round_up = match mode {
            RoundingMode::Truncate => false,
            RoundingMode::NearestEven => half_or_more && raw != 1u128 << 127,
        };
        return Some(round_up as u128);
    }
    let kept = raw >> shift;
    match mode {
        RoundingMode::Truncate => Some(kept),
        RoundingMode::NearestEven => {
            let rem = raw & ((1u128 << shift) - 1);
            let half = 1u128 << (shift - 1);
            let up = rem > half || (rem == half && kept & 1 == 1);
            if up {
                kept.checked_add(1)
            } else {
                Some(kept)
            }
        }
    }
}

impl FixedUQ {
    /// Builds a value from its raw magnitude, checking that it fits the format.
    pub fn new(raw: u128, int_bits: u32, frac_bits: u32) -> Result<Self, FixedError> {
        check_format(int_bits, frac_bits)?;
        if raw & !width_mask(int_bits + frac_bits) != 0 {
            return Err(FixedError::RawOutOfRange {
                raw,
                int_bits,
                frac_bits,
            });
        }
        Ok(Self {
            raw,
            int_bits,
            frac_bits,
        })
    }

    pub fn zero(int_bits: u32, frac_bits: u32) -> Result<Self, FixedError> {
        Self::new(0, int_bits, frac_bits)
    }

    /// Exactly 1.0 in `u1.<frac_bits>`.
    pub fn one(frac_bits: u32) -> Result<Self, FixedError> {
        check_format(1, frac_bits)?;
        Self::new(1u128 << frac_bits, 1, frac_bits)
    }

    pub fn raw(&self) -> u128 {
        self.raw
    }

    pub fn int_bits(&self) -> u32 {
        self.int_bits
    }

    pub fn frac_bits(&self) -> u32 {
        self.frac_bits
    }

    pub fn width(&self) -> u32 {
        self.int_bits + self.frac_bits
    }

    pub fn is_zero(&self) -> bool {
        self.raw == 0
    }

    /// Weight of the least significant bit, `2^-frac_bits`.
    pub fn lsb(&self) -> f64 {
        (-(self.frac_bits as f64)).exp2()
    }

    /// Nearest `f64` to the represented value.
    pub fn to_f64(&self) -> f64 {
        // u128 -> f64 rounds to nearest; scaling by a power of two is exact
        // unless the result is subnormal.
        (self.raw as f64) * (-(self.frac_bits as f64)).exp2()
    }

    /// Exact value as a rational.
    pub fn to_rational(&self) -> BigRational {
        BigRational::new(
            BigUint::from(self.raw).into(),
            (BigUint::one() << self.frac_bits as usize).into(),
        )
    }

    /// Re-expresses the value with a different fraction width.
    ///
    /// Narrowing rounds per `mode`; widening pads zeros and is exact. The
    /// integer width is kept unless rounding carries into a new bit, which is
    /// reported as overflow.
    pub fn with_frac(&self, frac_bits: u32, mode: RoundingMode) -> Result<Self, FixedError> {
        self.requantize(self.int_bits, frac_bits, mode)
    }

    /// Re-expresses the value in `u<int_bits>.<frac_bits>`.
    pub fn requantize(
        &self,
        int_bits: u32,
        frac_bits: u32,
        mode: RoundingMode,
    ) -> Result<Self, FixedError> {
        check_format(int_bits, frac_bits)?;
        let raw =
            rescale_raw(self.raw, self.frac_bits, frac_bits, mode).ok_or(FixedError::Overflow {
                int_bits,
                frac_bits,
            })?;
        Self::new(raw, int_bits, frac_bits).map_err(|_| FixedError::Overflow {
            int_bits,
            frac_bits,
        })
    }

    /// Parses a non-negative `f64` exactly (every finite double is dyadic).
    pub fn quantize_f64(
        x: f64,
        int_bits: u32,
        frac_bits: u32,
        mode: RoundingMode,
    ) -> Result<Self, FixedError> {
        if x.is_sign_negative() && x != 0.0 {
            return Err(FixedError::Negative);
        }
        let exact = BigRational::from_float(x).ok_or(FixedError::Overflow {
            int_bits,
            frac_bits,
        })?;
        quantize(&exact, int_bits, frac_bits, mode)
    }
}

impl fmt::Debug for FixedUQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "FixedUQ(u{}.{} raw={:#x} ~{})",
            self.int_bits,
            self.frac_bits,
            self.raw,
            self.to_f64()
        )
    }
}

impl fmt::Display for FixedUQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

/// Rounds an exact non-negative real onto the `u<int_bits>.<frac_bits>` grid.
pub fn quantize(
    x: &BigRational,
    int_bits: u32,
    frac_bits: u32,
    mode: RoundingMode,
) -> Result<FixedUQ, FixedError> {
    check_format(int_bits, frac_bits)?;
    if x.is_negative() {
        return Err(FixedError::Negative);
    }
    let overflow = FixedError::Overflow {
        int_bits,
        frac_bits,
    };
    let scaled = x * BigRational::from_integer((BigUint::one() << frac_bits as usize).into());
    let (q, r) = scaled.numer().div_rem(scaled.denom());
    let mut raw = q;
    if mode == RoundingMode::NearestEven && !r.is_zero() {
        let twice = r * 2u32;
        let den = scaled.denom();
        if twice > *den || (twice == *den && raw.is_odd()) {
            raw += 1u32;
        }
    }
    let raw = raw.to_u128().ok_or(overflow.clone())?;
    FixedUQ::new(raw, int_bits, frac_bits).map_err(|_| overflow)
}

/// Exact double-width product, truncated to `out_frac` fraction bits.
///
/// The result has `a.int_bits + b.int_bits` integer bits.
///
/// # Panics
///
/// Panics if the operand widths sum to more than 128 bits.
pub fn mul_trunc(a: FixedUQ, b: FixedUQ, out_frac: u32) -> FixedUQ {
    assert!(
        a.width() + b.width() <= MAX_WIDTH,
        "product of u{}.{} and u{}.{} exceeds {MAX_WIDTH} bits",
        a.int_bits,
        a.frac_bits,
        b.int_bits,
        b.frac_bits
    );
    let product = a.raw * b.raw;
    let int_bits = a.int_bits + b.int_bits;
    let raw = rescale_raw(
        product,
        a.frac_bits + b.frac_bits,
        out_frac,
        RoundingMode::Truncate,
    )
    .expect("widening a product cannot exceed the declared width");
    FixedUQ::new(raw, int_bits, out_frac).expect("product fits the summed integer width")
}

/// Logical right shift inside the operand's own width.
pub fn shr(a: FixedUQ, k: u32) -> FixedUQ {
    let raw = if k >= 128 { 0 } else { a.raw >> k };
    FixedUQ { raw, ..a }
}

/// Exact sum; the result gains one integer bit and takes the wider fraction.
pub fn add(a: FixedUQ, b: FixedUQ) -> Result<FixedUQ, FixedError> {
    let frac = a.frac_bits.max(b.frac_bits);
    let int = a.int_bits.max(b.int_bits) + 1;
    let overflow = FixedError::Overflow {
        int_bits: int,
        frac_bits: frac,
    };
    let ar =
        rescale_raw(a.raw, a.frac_bits, frac, RoundingMode::Truncate).ok_or(overflow.clone())?;
    let br =
        rescale_raw(b.raw, b.frac_bits, frac, RoundingMode::Truncate).ok_or(overflow.clone())?;
    let raw = ar.checked_add(br).ok_or(overflow.clone())?;
    FixedUQ::new(raw, int, frac).map_err(|_| overflow)
}

/// Bitwise not of a pure fraction: `(2^W - 1) - raw`, i.e. `1 - a - 2^-W`.
pub fn ones_complement(a: FixedUQ) -> Result<FixedUQ, FixedError> {
    if a.int_bits != 0 {
        return Err(FixedError::NotPureFraction {
            int_bits: a.int_bits,
            frac_bits: a.frac_bits,
        });
    }
    Ok(FixedUQ {
        raw: width_mask(a.frac_bits) - a.raw,
        ..a
    })
}

/// Exact `1 - a` in `u1.W`, where `W` is the operand's fraction width.
pub fn one_minus(a: FixedUQ) -> Result<FixedUQ, FixedError> {
    if a.int_bits > 1 {
        return Err(FixedError::NotPureFraction {
            int_bits: a.int_bits,
            frac_bits: a.frac_bits,
        });
    }
    let one = 1u128
        .checked_shl(a.frac_bits)
        .filter(|_| a.frac_bits < 128)
        .ok_or(FixedError::InvalidFormat {
            int_bits: 1,
            frac_bits: a.frac_bits,
        })?;
    if a.raw > one {
        return Err(FixedError::GreaterThanOne);
    }
    FixedUQ::new(one - a.raw, 1, a.frac_bits)
}

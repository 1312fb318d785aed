//! Residual approximation of `e^-x` for `0 <= x < 1/8`.
//!
//! The proposed evaluator is the nested form
//!
//! ```text
//! T_c = 1 - (x>>2 + x>>4)        cubic term,  Wc fraction bits
//! T_s = 1 - (x>>1) * T_c         square term, Ws fraction bits
//! T_l = 1 - x * T_s              linear term, M fraction bits
//! ```
//!
//! where `0.3125 = 2^-2 + 2^-4` replaces the `1/3` of the Taylor cubic. Each
//! `1 - t` narrows `t` to the term's width first and then either subtracts
//! exactly or inverts the bits.

use crate::fixedpoint::{self, add, mul_trunc, shr, FixedUQ, RoundingMode};

use super::{Arithmetic, ExpConfig, ExpError, OpCounts, SeriesVariant};

/// `C3 = 0.1666259765625 = 1365 / 2^13`.
pub const PARTZSCH_C3_RAW: u128 = 1365;
pub const PARTZSCH_C3_FRAC: u32 = 13;

/// Views a value known to be below one as `u0.W`.
fn as_fraction(t: FixedUQ) -> Result<FixedUQ, ExpError> {
    Ok(t.requantize(0, t.frac_bits(), RoundingMode::Truncate)?)
}

/// `1 - t` on a `width`-bit wire, returned as `u1.width`.
fn one_minus_narrowed(
    t: FixedUQ,
    width: u32,
    arithmetic: Arithmetic,
    ops: &mut OpCounts,
) -> Result<FixedUQ, ExpError> {
    let t = as_fraction(t)?.with_frac(width, RoundingMode::Truncate)?;
    match arithmetic {
        Arithmetic::OnesComplement => {
            ops.inverters += 1;
            Ok(fixedpoint::ones_complement(t)?.requantize(1, width, RoundingMode::Truncate)?)
        }
        Arithmetic::TwosComplement => {
            ops.adders += 1;
            Ok(fixedpoint::one_minus(t)?)
        }
    }
}

/// Exact `a - b` for `a >= b`, on `a`'s format.
fn sub_exact(a: FixedUQ, b: FixedUQ, ops: &mut OpCounts) -> Result<FixedUQ, ExpError> {
    ops.adders += 1;
    let frac = a.frac_bits().max(b.frac_bits());
    let a = a.with_frac(frac, RoundingMode::Truncate)?;
    let b = b.with_frac(frac, RoundingMode::Truncate)?;
    let raw = a
        .raw()
        .checked_sub(b.raw())
        .ok_or_else(|| ExpError::Domain("negative intermediate in series".into()))?;
    Ok(FixedUQ::new(raw, a.int_bits(), frac)?)
}

fn proposed(x: FixedUQ, cfg: &ExpConfig, ops: &mut OpCounts) -> Result<FixedUQ, ExpError> {
    let m = cfg.mult_precision;
    ops.adders += 1;
    let u = add(shr(x, 2), shr(x, 4))?;
    let cubic = one_minus_narrowed(u, cfg.cubic_width, cfg.arithmetic, ops)?;

    ops.multiplies += 1;
    let half_x = shr(x, 1);
    let v = mul_trunc(half_x, cubic, half_x.frac_bits() + cubic.frac_bits());
    let square = one_minus_narrowed(v, cfg.square_width, cfg.arithmetic, ops)?;

    ops.multiplies += 1;
    let w = mul_trunc(x, square, m);
    one_minus_narrowed(w, m, cfg.arithmetic, ops)
}

fn partzsch(q: FixedUQ, cfg: &ExpConfig, ops: &mut OpCounts) -> Result<FixedUQ, ExpError> {
    let m = cfg.mult_precision;
    let c3 = FixedUQ::new(PARTZSCH_C3_RAW, 0, PARTZSCH_C3_FRAC)?;
    ops.multiplies += 3;
    let q2 = mul_trunc(q, q, m);
    let q3 = mul_trunc(q2, q, m);
    let c3q3 = mul_trunc(c3, q3, m);
    // 1 - (q - (q^2/2 - C3 q^3)); both inner differences are non-negative
    // for q < 1/8.
    let inner = sub_exact(shr(q2, 1), c3q3, ops)?;
    let outer = sub_exact(q, inner, ops)?;
    one_minus_narrowed(outer, m, cfg.arithmetic, ops)
}

pub(crate) fn series_counted(
    x: FixedUQ,
    cfg: &ExpConfig,
    ops: &mut OpCounts,
) -> Result<FixedUQ, ExpError> {
    // x < 2^-3 means every bit at or above weight 2^-3 is clear.
    let limit_ok = match x.frac_bits() {
        f if f < 3 => x.raw() == 0,
        f => x.raw() >> (f - 3) == 0,
    };
    if !limit_ok {
        return Err(ExpError::Domain(format!(
            "series input {} is not below 1/8",
            x.to_f64()
        )));
    }
    let x = x.requantize(0, cfg.mult_precision, RoundingMode::Truncate)?;
    match cfg.variant {
        SeriesVariant::ProposedCubic => proposed(x, cfg, ops),
        SeriesVariant::PartzschCoeffs => partzsch(x, cfg, ops),
    }
}

/// Evaluates the configured series on a residual `x < 1/8`.
///
/// `x` is aligned to `M` fraction bits (zero padded, or truncated when
/// `M` is narrower). The result is `u1.M`.
pub fn series_exp(x: FixedUQ, cfg: &ExpConfig) -> Result<FixedUQ, ExpError> {
    cfg.validate()?;
    series_counted(x, cfg, &mut OpCounts::default())
}

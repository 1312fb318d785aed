//! Parsing of `--input` values.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};

use fxexp::{fixedpoint, RoundingMode};

use crate::UsageError;

/// A signed input on the `P`-bit grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridInput {
    pub negative: bool,
    pub raw: u128,
}

impl GridInput {
    pub fn signed_raw(&self) -> Result<i128, UsageError> {
        let mag = i128::try_from(self.raw)
            .map_err(|_| UsageError("input magnitude is too large".into()))?;
        Ok(if self.negative { -mag } else { mag })
    }

    pub fn rational(&self, p: u32) -> BigRational {
        let mag = BigRational::new(
            BigInt::from(self.raw),
            BigInt::from(BigUint::one() << p as usize),
        );
        if self.negative {
            -mag
        } else {
            mag
        }
    }
}

/// Exact value of a decimal literal such as `-1.25e-3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i32>().ok()?),
        None => (body, 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return None;
    }
    if exponent.unsigned_abs() > 4000 {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / 10;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let value = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if negative { -value } else { value })
}

/// Reads a decimal (rounded to nearest at `p` bits) or a `0x` raw integer.
pub fn parse_input(s: &str, p: u32) -> Result<GridInput, UsageError> {
    let t = s.trim();
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    if let Some(hex) = body.strip_prefix("0x").or_else(|| body.strip_prefix("0X")) {
        let raw = u128::from_str_radix(hex, 16)
            .map_err(|_| UsageError(format!("`{s}` is not a valid hex raw value")))?;
        return Ok(GridInput {
            negative: negative && raw != 0,
            raw,
        });
    }
    let value =
        parse_decimal(t).ok_or_else(|| UsageError(format!("`{s}` is not a decimal number")))?;
    let negative = value < BigRational::zero();
    let mag = if negative { -value } else { value };
    let q = fixedpoint::quantize(&mag, 128 - p, p, RoundingMode::NearestEven)
        .map_err(|_| UsageError(format!("`{s}` is not representable with {p} fraction bits")))?;
    Ok(GridInput {
        negative: negative && q.raw() != 0,
        raw: q.raw(),
    })
}

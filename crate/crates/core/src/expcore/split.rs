use crate::fixedpoint::FixedUQ;

use super::config::MIN_PRECISION;
use super::ExpError;

/// Bit fields produced by the operand splitter for an input with `P`
/// fraction bits.
///
/// `value = sat*16 + int4 + frac3/8 + residual * 2^-P`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SplitParts {
    /// Bits `P+4` and up. Any nonzero value saturates the output.
    pub sat: u128,
    /// Bits `P..P+3`, the integer LUT index.
    pub int4: u8,
    /// Bits `P-3..P-1`, the fraction LUT index.
    pub frac3: u8,
    /// Bits `0..P-4`; a value below `2^-3` with `P-3` significant bits.
    pub residual: u128,
    pub precision: u32,
}

impl SplitParts {
    /// Fields driven by the saturation logic: every LUT index and residual bit
    /// set, which selects the largest input below 16.
    pub fn saturated(precision: u32) -> Self {
        Self {
            sat: 0,
            int4: 15,
            frac3: 7,
            residual: (1u128 << (precision - 3)) - 1,
            precision,
        }
    }

    pub fn is_saturated(&self) -> bool {
        self.sat != 0
    }

    /// Residual as a pure fraction with `P` fraction bits.
    pub fn residual_fixed(&self) -> FixedUQ {
        FixedUQ::new(self.residual, 0, self.precision).expect("residual is below 2^-3")
    }

    /// Reassembles the raw input, mainly for checks.
    pub fn reassemble(&self) -> Option<u128> {
        let p = self.precision;
        let upper = self
            .sat
            .checked_mul(16)?
            .checked_add(self.int4 as u128)?
            .checked_shl(p)
            .filter(|v| v >> p == self.sat * 16 + self.int4 as u128)?;
        Some(upper | (self.frac3 as u128) << (p - 3) | self.residual)
    }
}

/// Partitions `a` (which must carry `P` fraction bits) into its four fields.
pub fn split_operand(a: FixedUQ, precision: u32) -> Result<SplitParts, ExpError> {
    if precision < MIN_PRECISION {
        return Err(ExpError::PrecisionTooSmall(precision));
    }
    if a.frac_bits() != precision {
        return Err(ExpError::InputFormat {
            expected_frac: precision,
            got_frac: a.frac_bits(),
        });
    }
    let p = precision;
    let raw = a.raw();
    let residual_bits = p - 3;
    Ok(SplitParts {
        sat: if p + 4 >= 128 { 0 } else { raw >> (p + 4) },
        int4: ((raw >> p) & 0xf) as u8,
        frac3: ((raw >> residual_bits) & 0x7) as u8,
        residual: raw & ((1u128 << residual_bits) - 1),
        precision: p,
    })
}

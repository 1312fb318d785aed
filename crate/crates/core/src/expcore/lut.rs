use crate::fixedpoint::{FixedUQ, RoundingMode};
use crate::hiprec;

use super::{ExpConfig, ExpError};

/// How LUT contents are rounded onto the `L`-bit grid.
pub const LUT_ROUNDING: RoundingMode = RoundingMode::Truncate;

/// `e^-i` for `i = 0..16` and `e^-j/8` for `j = 0..8`, each stored as
/// `u1.L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Luts {
    pub integer: [FixedUQ; 16],
    pub fraction: [FixedUQ; 8],
    pub precision: u32,
}

fn entry(numer: u128, frac_bits: u32, precision: u32) -> FixedUQ {
    let value = hiprec::exp_neg_dyadic(numer, frac_bits).to_wide();
    let raw = match LUT_ROUNDING {
        RoundingMode::Truncate => value.floor_raw(precision),
        RoundingMode::NearestEven => value.round_raw(precision),
    };
    FixedUQ::new(raw, 1, precision).expect("e^-x <= 1 fits u1.L")
}

impl Luts {
    pub fn with_precision(precision: u32) -> Self {
        Self {
            integer: std::array::from_fn(|i| entry(i as u128, 0, precision)),
            fraction: std::array::from_fn(|j| entry(j as u128, 3, precision)),
            precision,
        }
    }

    pub fn integer_entry(&self, index: u8) -> FixedUQ {
        self.integer[index as usize]
    }

    pub fn fraction_entry(&self, index: u8) -> FixedUQ {
        self.fraction[index as usize]
    }
}

/// Builds the two tables for `cfg.lut_precision`.
pub fn build_luts(cfg: &ExpConfig) -> Result<Luts, ExpError> {
    cfg.validate()?;
    Ok(Luts::with_precision(cfg.lut_precision))
}

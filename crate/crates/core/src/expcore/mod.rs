//! The `e^-a` datapath: operand splitting, two LUT lookups and a short
//! series on the residual.
//!
//! ```text
//! a = 16*sat + int4 + frac3/8 + x      (x < 1/8)
//! e^-a = LUT_i[int4] * LUT_f[frac3] * series(x)
//! ```
//!
//! Inputs of 16 or more saturate to the value produced for the largest
//! input below 16.

mod config;
mod lut;
mod series;
mod split;

use thiserror::Error;

use crate::fixedpoint::{mul_trunc, FixedError, FixedUQ, RoundingMode};

pub use config::{Arithmetic, ExpConfig, SeriesVariant, MAX_DATAPATH_WIDTH, MIN_PRECISION};
pub use lut::{build_luts, Luts, LUT_ROUNDING};
pub use series::{series_exp, PARTZSCH_C3_FRAC, PARTZSCH_C3_RAW};
pub use split::{split_operand, SplitParts};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpError {
    #[error("output precision P={0} is below the minimum of {MIN_PRECISION}")]
    PrecisionTooSmall(u32),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("input must carry {expected_frac} fraction bits, got {got_frac}")]
    InputFormat { expected_frac: u32, got_frac: u32 },
    #[error("LUTs were built for L={got}, configuration asks for L={expected}")]
    LutMismatch { expected: u32, got: u32 },
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Fixed(#[from] FixedError),
}

/// Hardware operations exercised by one evaluation.
///
/// `adders` counts carry-propagate adders and subtractors; `inverters` counts
/// bitwise-not stages, which need no carry chain.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    pub multiplies: u32,
    pub adders: u32,
    pub inverters: u32,
}

/// A validated configuration bundled with its LUTs.
#[derive(Debug, Clone)]
pub struct ExpUnit {
    config: ExpConfig,
    luts: Luts,
}

impl ExpUnit {
    pub fn new(config: ExpConfig) -> Result<Self, ExpError> {
        let luts = build_luts(&config)?;
        Ok(Self { config, luts })
    }

    pub fn with_luts(config: ExpConfig, luts: Luts) -> Result<Self, ExpError> {
        config.validate()?;
        if luts.precision != config.lut_precision {
            return Err(ExpError::LutMismatch {
                expected: config.lut_precision,
                got: luts.precision,
            });
        }
        Ok(Self { config, luts })
    }

    pub fn config(&self) -> &ExpConfig {
        &self.config
    }

    pub fn luts(&self) -> &Luts {
        &self.luts
    }

    /// `e^-a` as `u1.M`, before the final cut to `P` bits.
    pub fn eval_wide(&self, a: FixedUQ) -> Result<FixedUQ, ExpError> {
        self.eval_wide_counted(a, &mut OpCounts::default())
    }

    pub fn eval_wide_counted(&self, a: FixedUQ, ops: &mut OpCounts) -> Result<FixedUQ, ExpError> {
        let cfg = &self.config;
        let p = cfg.out_precision;
        let m = cfg.mult_precision;
        let mut parts = split_operand(a, p)?;
        if parts.is_saturated() {
            parts = SplitParts::saturated(p);
        }

        ops.multiplies += 1;
        let lut_product = mul_trunc(
            self.luts.integer_entry(parts.int4),
            self.luts.fraction_entry(parts.frac3),
            m,
        );
        let tail = series::series_counted(parts.residual_fixed(), cfg, ops)?;

        ops.multiplies += 1;
        let wide = mul_trunc(lut_product, tail, m);
        Ok(wide.requantize(1, m, RoundingMode::Truncate)?)
    }

    /// `e^-a` as `u1.P`.
    pub fn eval(&self, a: FixedUQ) -> Result<FixedUQ, ExpError> {
        self.eval_counted(a, &mut OpCounts::default())
    }

    pub fn eval_counted(&self, a: FixedUQ, ops: &mut OpCounts) -> Result<FixedUQ, ExpError> {
        let wide = self.eval_wide_counted(a, ops)?;
        Ok(wide.requantize(1, self.config.out_precision, RoundingMode::Truncate)?)
    }

    /// Evaluates a raw input with `P` fraction bits.
    pub fn eval_raw(&self, raw: u128) -> Result<FixedUQ, ExpError> {
        self.eval(self.input(raw)?)
    }

    /// Wraps a raw integer as an input with `P` fraction bits.
    pub fn input(&self, raw: u128) -> Result<FixedUQ, ExpError> {
        let p = self.config.out_precision;
        Ok(FixedUQ::new(raw, input_int_bits(raw, p), p)?)
    }
}

/// Smallest integer width that holds `raw` at `p` fraction bits, at least 5.
fn input_int_bits(raw: u128, p: u32) -> u32 {
    let bits = 128 - raw.leading_zeros();
    bits.saturating_sub(p).max(5).min(128 - p)
}

/// `e^-a` truncated to `P` fraction bits.
pub fn exp_neg(a: FixedUQ, cfg: &ExpConfig, luts: &Luts) -> Result<FixedUQ, ExpError> {
    ExpUnit::with_luts(*cfg, luts.clone())?.eval(a)
}

/// `e^-a` at the multiplier width `M`, as fed to downstream arithmetic.
pub fn exp_neg_wide(a: FixedUQ, cfg: &ExpConfig, luts: &Luts) -> Result<FixedUQ, ExpError> {
    ExpUnit::with_luts(*cfg, luts.clone())?.eval_wide(a)
}

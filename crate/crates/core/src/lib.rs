//! Bit-accurate model of a fixed-point `e^-x` unit built from two small LUTs
//! and a shift-add series, plus the tooling to measure its accuracy.
//!
//! ```
//! use fxexp::{ExpConfig, ExpUnit};
//!
//! let unit = ExpUnit::new(ExpConfig::headline()).unwrap();
//! let y = unit.eval_raw(1 << 16).unwrap(); // e^-1 at P=16
//! assert!((y.to_f64() - (-1.0f64).exp()).abs() < 3.0 / 65536.0);
//! ```

pub mod analysis;
pub mod derived;
pub mod expcore;
pub mod fixedpoint;
pub mod hiprec;

pub use expcore::{
    build_luts, exp_neg, exp_neg_wide, series_exp, split_operand, Arithmetic, ExpConfig, ExpError,
    ExpUnit, Luts, OpCounts, SeriesVariant, SplitParts,
};
pub use fixedpoint::{FixedError, FixedUQ, RoundingMode};

use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::derived::{eval_derived, CombineWidth, DerivedSpec};
use crate::expcore::{Arithmetic, ExpConfig, ExpError, ExpUnit, MIN_PRECISION};
use crate::hiprec::{self, Wide, WIDE_FRAC};

use super::oracle::oracle_exp_neg_raw;
use super::sweep::{sweep_unit, AccuracyBits, ErrorReport};

/// Polynomials compared on the residual interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResidualPolynomial {
    /// `1 - x + x^2/2 - 0.15625 x^3`: the cubic with `1/3` replaced by `0.3125`.
    ShiftAdd,
    /// `1 - x + x^2/2 - x^3/6`.
    Taylor,
}

impl ResidualPolynomial {
    pub fn name(self) -> &'static str {
        match self {
            ResidualPolynomial::ShiftAdd => "shift_add",
            ResidualPolynomial::Taylor => "taylor",
        }
    }

    fn eval(self, x: Wide) -> Wide {
        let x2 = x.mul(x);
        let x3 = x2.mul(x);
        let cubic = match self {
            // 0.3125 / 2 = 5/32, exact as a shift-add.
            ResidualPolynomial::ShiftAdd => x3.shr(3).checked_add(x3.shr(5)).unwrap(),
            ResidualPolynomial::Taylor => x3.div_int(6),
        };
        let plus = Wide::ONE.checked_add(x2.shr(1)).unwrap();
        let minus = x.checked_add(cubic).unwrap();
        plus.checked_sub(minus)
            .expect("polynomial is positive on [0, 1/8)")
    }
}

/// Worst deviation of a residual polynomial from `e^-x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoeffReport {
    pub polynomial: ResidualPolynomial,
    pub precision: u32,
    pub max_error: Wide,
    pub max_abs_error: f64,
    /// Grid index `k` of the worst point `x = k * 2^-P`.
    pub argmax_index: u128,
    pub samples: u64,
}

/// Compares both residual polynomials against `e^-x` on the `2^(P-3)`
/// points `k * 2^-P` of `[0, 1/8)`, without any width truncation.
pub fn coeff_error_scan(p: u32) -> Result<[CoeffReport; 2], ExpError> {
    if p < MIN_PRECISION {
        return Err(ExpError::PrecisionTooSmall(p));
    }
    if p > 40 {
        return Err(ExpError::InvalidConfig(
            "coefficient scan supports P <= 40".into(),
        ));
    }
    let n = 1u128 << (p - 3);
    let scan = |poly: ResidualPolynomial| {
        let (err, arg) = (0..n as u64)
            .into_par_iter()
            .map(|k| {
                let k = k as u128;
                let x = Wide::from_dyadic(k, p).unwrap();
                (poly.eval(x).abs_diff(oracle_exp_neg_raw(k, p)), k)
            })
            .reduce(|| (Wide::ZERO, 0), max_by_error);
        CoeffReport {
            polynomial: poly,
            precision: p,
            max_error: err,
            max_abs_error: err.to_f64(),
            argmax_index: arg,
            samples: n as u64,
        }
    };
    Ok([
        scan(ResidualPolynomial::ShiftAdd),
        scan(ResidualPolynomial::Taylor),
    ])
}

fn max_by_error(a: (Wide, u128), b: (Wide, u128)) -> (Wide, u128) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => (a.0, a.1.min(b.1)),
    }
}

/// Points per range in [`series_range_error`].
pub const RANGE_GRID_BITS: u32 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RangeReport {
    pub terms: u32,
    pub range_pow: i32,
    pub max_error: Wide,
    pub max_abs_error: f64,
    pub accuracy: AccuracyBits,
}

/// Accuracy of the alternating Taylor series with `terms` terms (2 = linear,
/// 3 = quadratic, 4 = cubic) over `[0, 2^range_pow)`, on a grid of
/// `2^16` evenly spaced points.
pub fn series_range_error(terms: u32, range_pow: i32) -> Result<RangeReport, ExpError> {
    if !(1..=8).contains(&terms) {
        return Err(ExpError::InvalidConfig(format!(
            "series terms must lie in 1..=8, got {terms}"
        )));
    }
    let frac = RANGE_GRID_BITS as i32 - range_pow;
    if range_pow > 0 || frac > WIDE_FRAC as i32 - 8 {
        return Err(ExpError::InvalidConfig(format!(
            "range exponent must lie in -100..=0, got {range_pow}"
        )));
    }
    let frac = frac as u32;
    let (err, _) = (0..1u64 << RANGE_GRID_BITS)
        .into_par_iter()
        .map(|k| {
            let k = k as u128;
            let x = Wide::from_dyadic(k, frac).unwrap();
            let mut even = Wide::ONE;
            let mut odd = Wide::ZERO;
            let mut term = Wide::ONE;
            for n in 1..terms {
                term = term.mul(x).div_int(n);
                if n % 2 == 0 {
                    even = even.checked_add(term).unwrap();
                } else {
                    odd = odd.checked_add(term).unwrap();
                }
            }
            let poly = even.checked_sub(odd).unwrap();
            (poly.abs_diff(hiprec::exp_neg_dyadic(k, frac).to_wide()), k)
        })
        .reduce(|| (Wide::ZERO, 0), max_by_error);
    Ok(RangeReport {
        terms,
        range_pow,
        max_error: err,
        max_abs_error: err.to_f64(),
        accuracy: AccuracyBits::from_error(err),
    })
}

/// Every combination of series length and range exponent.
pub fn series_range_table(
    terms: &[u32],
    range_pows: RangeInclusive<i32>,
) -> Result<Vec<RangeReport>, ExpError> {
    let mut rows = Vec::new();
    for &t in terms {
        for r in range_pows.clone() {
            rows.push(series_range_error(t, r)?);
        }
    }
    Ok(rows)
}

/// Accuracy over `[0, 16)` for each pair of cubic and square term widths.
#[derive(Debug, Clone, PartialEq)]
pub struct TermPrecisionTable {
    pub base: ExpConfig,
    pub cubic_widths: Vec<u32>,
    pub square_widths: Vec<u32>,
    /// `reports[i][j]` is for `cubic_widths[i]` and `square_widths[j]`.
    pub reports: Vec<Vec<ErrorReport>>,
}

impl TermPrecisionTable {
    pub fn bits(&self, wc: u32, ws: u32) -> Option<AccuracyBits> {
        let i = self.cubic_widths.iter().position(|&w| w == wc)?;
        let j = self.square_widths.iter().position(|&w| w == ws)?;
        Some(self.reports[i][j].accuracy_bits())
    }

    pub fn bit_matrix(&self) -> Vec<Vec<i32>> {
        self.reports
            .iter()
            .map(|row| row.iter().map(|r| r.accuracy_bits().bits).collect())
            .collect()
    }
}

pub fn term_precision_table(
    base: &ExpConfig,
    cubic_widths: &[u32],
    square_widths: &[u32],
) -> Result<TermPrecisionTable, ExpError> {
    let mut reports = Vec::with_capacity(cubic_widths.len());
    for &wc in cubic_widths {
        let mut row = Vec::with_capacity(square_widths.len());
        for &ws in square_widths {
            let unit = ExpUnit::new(base.with_term_widths(wc, ws))?;
            row.push(sweep_unit(&unit)?);
        }
        reports.push(row);
    }
    Ok(TermPrecisionTable {
        base: *base,
        cubic_widths: cubic_widths.to_vec(),
        square_widths: square_widths.to_vec(),
        reports,
    })
}

/// One configuration and its sweep result.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: ExpConfig,
    pub report: ErrorReport,
}

/// Sweeps every `(P, M, L, mode)` combination with `M = P + dm` and
/// `L = P + dl`. Term widths follow `M`.
pub fn mult_lut_sweep(
    precisions: &[u32],
    mult_offsets: RangeInclusive<u32>,
    lut_offsets: RangeInclusive<u32>,
    modes: &[Arithmetic],
) -> Result<Vec<SweepRow>, ExpError> {
    let mut rows = Vec::new();
    for &p in precisions {
        for dm in mult_offsets.clone() {
            for dl in lut_offsets.clone() {
                for &mode in modes {
                    let config = ExpConfig::new(p, p + dm, p + dl, mode);
                    let report = sweep_unit(&ExpUnit::new(config)?)?;
                    rows.push(SweepRow { config, report });
                }
            }
        }
    }
    Ok(rows)
}

/// Worst error of one derived function under one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRow {
    pub function: DerivedSpec,
    /// Multiplier and LUT precision of the underlying exponential.
    pub precision: u32,
    pub max_abs_error: f64,
    /// Error in units of `2^-P`.
    pub ulps: f64,
    /// Worst input `x = raw * 2^-P`.
    pub argmax_input: u128,
    pub samples: u64,
}

/// Swept inputs `x = raw * 2^-P >= 0` for a derived function.
///
/// Negative inputs are covered by symmetry. The bound is where the
/// exponential's argument reaches 16 and saturates.
pub fn derived_domain(spec: &DerivedSpec, p: u32) -> u128 {
    match spec {
        DerivedSpec::Sigmoid | DerivedSpec::Elu { .. } => 16 << p,
        DerivedSpec::Tanh => 8 << p,
        // x^2/2 < 16 means x < sqrt(32).
        DerivedSpec::Gaussian { .. } => {
            let limit = 32u128 << (2 * p);
            let mut r = ((limit as f64).sqrt()) as u128;
            while r * r >= limit {
                r -= 1;
            }
            while (r + 1) * (r + 1) < limit {
                r += 1;
            }
            r + 1
        }
    }
}

/// Reference value of a derived function for `x = raw * 2^-P >= 0`.
fn derived_reference(spec: &DerivedSpec, raw: u128, p: u32) -> Result<Wide, ExpError> {
    let one = Wide::ONE;
    Ok(match *spec {
        DerivedSpec::Sigmoid => {
            let e = oracle_exp_neg_raw(raw, p);
            one.div(one.checked_add(e).unwrap()).unwrap()
        }
        DerivedSpec::Tanh => {
            let e = oracle_exp_neg_raw(2 * raw, p);
            one.checked_sub(e)
                .unwrap()
                .div(one.checked_add(e).unwrap())
                .unwrap()
        }
        DerivedSpec::Gaussian { mu, sigma } if mu == 0.0 && sigma == 1.0 => {
            oracle_exp_neg_raw(raw * raw, 2 * p + 1)
        }
        _ => {
            return Err(ExpError::InvalidConfig(format!(
                "no error reference for {spec:?}"
            )))
        }
    })
}

/// Sweeps one derived function over its domain (see [`derived_domain`]).
pub fn derived_error(
    spec: &DerivedSpec,
    cfg: &ExpConfig,
    width: CombineWidth,
) -> Result<DerivedRow, ExpError> {
    let unit = ExpUnit::new(*cfg)?;
    let p = cfg.out_precision;
    derived_reference(spec, 0, p)?;
    let n = derived_domain(spec, p);
    let (err, arg) = (0..n as u64)
        .into_par_iter()
        .map(|raw| -> Result<(Wide, u128), ExpError> {
            let raw = raw as u128;
            let got = eval_derived(spec, raw as i128, &unit, width)?;
            let got = Wide::from_dyadic(got.magnitude.raw(), got.magnitude.frac_bits())
                .expect("derived values stay below one");
            Ok((got.abs_diff(derived_reference(spec, raw, p)?), raw))
        })
        .try_reduce(|| (Wide::ZERO, 0), |a, b| Ok(max_by_error(a, b)))?;
    let max_abs_error = err.to_f64();
    Ok(DerivedRow {
        function: *spec,
        precision: cfg.mult_precision,
        max_abs_error,
        ulps: max_abs_error * (p as f64).exp2(),
        argmax_input: arg,
        samples: n as u64,
    })
}

/// Functions reported by [`derived_error_table`], in row order.
pub const DERIVED_TABLE_FUNCTIONS: [DerivedSpec; 3] = [
    DerivedSpec::STANDARD_GAUSSIAN,
    DerivedSpec::Sigmoid,
    DerivedSpec::Tanh,
];

/// Gaussian, sigmoid and tanh errors under each configuration.
pub fn derived_error_table(
    configs: &[ExpConfig],
    width: CombineWidth,
) -> Result<Vec<DerivedRow>, ExpError> {
    let mut rows = Vec::new();
    for cfg in configs {
        for spec in &DERIVED_TABLE_FUNCTIONS {
            rows.push(derived_error(spec, cfg, width)?);
        }
    }
    Ok(rows)
}

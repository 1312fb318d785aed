use std::fmt;

use rayon::prelude::*;

use crate::expcore::{ExpConfig, ExpError, ExpUnit};
use crate::hiprec::{Wide, WIDE_FRAC};

use super::oracle::{oracle_table, MAX_SWEEP_PRECISION};

/// `floor(-log2(err))`: the number of leading fraction bits an error of this
/// size never disturbs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccuracyBits {
    pub bits: i32,
}

impl AccuracyBits {
    /// A zero error is reported as the full oracle resolution.
    pub fn from_error(err: Wide) -> Self {
        Self {
            bits: err.neg_log2_floor().unwrap_or(WIDE_FRAC as i32),
        }
    }
}

impl fmt::Display for AccuracyBits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bits)
    }
}

/// Worst-case error of one configuration over its swept inputs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorReport {
    /// Output precision `P`; one ulp is `2^-P`.
    pub precision: u32,
    /// Largest `|y - e^-a|` against the unquantized reference.
    pub max_error: Wide,
    pub max_abs_error: f64,
    pub max_ulps: f64,
    /// Raw input (at `P` fraction bits) attaining `max_error`; the smallest
    /// such input on ties.
    pub argmax_input: u128,
    /// Largest distance, in ulps, to the reference rounded to nearest at `P`.
    pub max_quantized_ulps: u128,
    pub quantized_argmax_input: u128,
    pub samples: u64,
}

impl ErrorReport {
    pub fn accuracy_bits(&self) -> AccuracyBits {
        AccuracyBits::from_error(self.max_error)
    }
}

#[derive(Clone, Copy)]
struct Worst {
    err: Wide,
    arg: u128,
    qerr: u128,
    qarg: u128,
    samples: u64,
}

impl Worst {
    const EMPTY: Worst = Worst {
        err: Wide::ZERO,
        arg: u128::MAX,
        qerr: 0,
        qarg: u128::MAX,
        samples: 0,
    };

    fn merge(self, o: Worst) -> Worst {
        let (err, arg) = pick(self.err, self.arg, o.err, o.arg);
        let (qerr, qarg) = pick(self.qerr, self.qarg, o.qerr, o.qarg);
        Worst {
            err,
            arg,
            qerr,
            qarg,
            samples: self.samples + o.samples,
        }
    }
}

/// Larger error wins; equal errors keep the smaller input so the reduction
/// does not depend on how the range was split.
fn pick<T: Ord>(a: T, a_arg: u128, b: T, b_arg: u128) -> (T, u128) {
    match a.cmp(&b) {
        std::cmp::Ordering::Greater => (a, a_arg),
        std::cmp::Ordering::Less => (b, b_arg),
        std::cmp::Ordering::Equal => (a, a_arg.min(b_arg)),
    }
}

/// Inputs above 16 checked on top of the exhaustive range.
pub fn saturation_spot_inputs(p: u32) -> Vec<u128> {
    vec![
        16 << p,
        (16 << p) + 1,
        17 << p,
        (32 << p) - 1,
        1000 << p,
        (1u128 << (p + 40)) + 12345,
    ]
}

const CHUNK: u128 = 1 << 12;

/// Exhaustive error sweep over `[0, 16)` at `P` fraction bits plus a few
/// saturated inputs.
pub fn sweep_error(cfg: &ExpConfig) -> Result<ErrorReport, ExpError> {
    let unit = ExpUnit::new(*cfg)?;
    sweep_unit(&unit)
}

pub fn sweep_unit(unit: &ExpUnit) -> Result<ErrorReport, ExpError> {
    let p = unit.config().out_precision;
    if p > MAX_SWEEP_PRECISION {
        return Err(ExpError::InvalidConfig(format!(
            "exhaustive sweeps are limited to P <= {MAX_SWEEP_PRECISION}"
        )));
    }
    let oracle = oracle_table(p);
    let n = 16u128 << p;

    let measure = |raw: u128| -> Result<Worst, ExpError> {
        let got = unit.eval_raw(raw)?.raw();
        let want = oracle.get(raw);
        let got_wide = Wide::from_dyadic(got, p).expect("output is at most one");
        let q = want.round_raw(p);
        Ok(Worst {
            err: got_wide.abs_diff(want),
            arg: raw,
            qerr: got.abs_diff(q),
            qarg: raw,
            samples: 1,
        })
    };

    let chunks = n.div_ceil(CHUNK);
    let exhaustive = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let lo = c as u128 * CHUNK;
            let hi = (lo + CHUNK).min(n);
            (lo..hi).try_fold(Worst::EMPTY, |acc, raw| {
                Ok::<_, ExpError>(acc.merge(measure(raw)?))
            })
        })
        .try_reduce(|| Worst::EMPTY, |a, b| Ok(a.merge(b)))?;

    let worst = saturation_spot_inputs(p)
        .into_iter()
        .try_fold(exhaustive, |acc, raw| {
            Ok::<_, ExpError>(acc.merge(measure(raw)?))
        })?;

    let max_abs_error = worst.err.to_f64();
    Ok(ErrorReport {
        precision: p,
        max_error: worst.err,
        max_abs_error,
        max_ulps: max_abs_error * (p as f64).exp2(),
        argmax_input: worst.arg,
        max_quantized_ulps: worst.qerr,
        quantized_argmax_input: worst.qarg,
        samples: worst.samples,
    })
}

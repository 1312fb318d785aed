//! Sigmoid, tanh, Gaussian and ELU on top of a single `e^-t` evaluation.
//!
//! Each function reduces to one exponential of a non-negative argument:
//!
//! ```text
//! sigmoid(x) = 1/(1+e)        e = e^-|x|   (x >= 0; e/(1+e) for x < 0)
//! tanh(x)    = (1-e)/(1+e)    e = e^-2|x|  (sign of x)
//! gauss(x)   = e              e = e^-(x-mu)^2/(2 sigma^2)
//! elu(x)     = alpha(e-1)     e = e^-|x|   (x < 0; x itself otherwise)
//! ```
//!
//! The argument is formed exactly and rounded to nearest at `P` fraction
//! bits. The combination after the exponential is exact and rounded once.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::expcore::{ExpError, ExpUnit};
use crate::fixedpoint::{quantize, FixedUQ, RoundingMode};

/// Function selector together with its parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DerivedSpec {
    Sigmoid,
    Tanh,
    Gaussian { mu: f64, sigma: f64 },
    Elu { alpha: f64 },
}

impl DerivedSpec {
    pub const STANDARD_GAUSSIAN: DerivedSpec = DerivedSpec::Gaussian {
        mu: 0.0,
        sigma: 1.0,
    };

    pub fn name(&self) -> &'static str {
        match self {
            DerivedSpec::Sigmoid => "sigmoid",
            DerivedSpec::Tanh => "tanh",
            DerivedSpec::Gaussian { .. } => "gaussian",
            DerivedSpec::Elu { .. } => "elu",
        }
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        match *self {
            DerivedSpec::Gaussian { mu, sigma } => {
                if !mu.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
                    return Err(ExpError::InvalidConfig(format!(
                        "gaussian needs finite mu and sigma > 0 (mu={mu}, sigma={sigma})"
                    )));
                }
            }
            DerivedSpec::Elu { alpha } if !alpha.is_finite() || alpha < 0.0 => {
                return Err(ExpError::InvalidConfig(format!(
                    "elu needs a finite alpha >= 0, got {alpha}"
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

impl fmt::Display for DerivedSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Where the exponential is tapped and how wide the combined result is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CombineWidth {
    /// Use the `M`-bit exponential and round the result to `M` bits.
    #[default]
    Datapath,
    /// Use the `P`-bit exponential and round the result to `P` bits.
    Output,
}

/// Sign and magnitude of a derived result.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DerivedValue {
    pub negative: bool,
    pub magnitude: FixedUQ,
}

impl DerivedValue {
    pub fn to_f64(&self) -> f64 {
        let m = self.magnitude.to_f64();
        if self.negative {
            -m
        } else {
            m
        }
    }
}

/// `round(n / d)`, ties to even.
fn div_rne(n: u128, d: u128) -> u128 {
    let (q, r) = (n / d, n % d);
    let twice = r * 2;
    if twice > d || (twice == d && q & 1 == 1) {
        q + 1
    } else {
        q
    }
}

/// Raw `P`-bit argument for the exponential, capped at 16 (which saturates
/// the exponential just like any larger value).
fn exp_argument(spec: &DerivedSpec, x_raw: i128, p: u32) -> Result<u128, ExpError> {
    let cap = 16u128 << p;
    let mag = x_raw.unsigned_abs();
    let arg = match *spec {
        DerivedSpec::Sigmoid | DerivedSpec::Elu { .. } => mag,
        DerivedSpec::Tanh => mag.saturating_mul(2),
        DerivedSpec::Gaussian { mu, sigma } if mu == 0.0 && sigma == 1.0 => {
            // x^2/2 = mag^2 * 2^-(2P+1); rounding it to P bits is an integer
            // shift with ties to even.
            match mag.checked_mul(mag) {
                Some(sq) if p + 1 < 128 => div_rne(sq, 1u128 << (p + 1)),
                _ => cap,
            }
        }
        DerivedSpec::Gaussian { mu, sigma } => {
            let x = BigRational::new(BigInt::from(x_raw), BigInt::from(1u8) << p as usize);
            let mu = BigRational::from_float(mu).expect("validated finite");
            let sigma = BigRational::from_float(sigma).expect("validated finite");
            let d = x - mu;
            let t = &d * &d / (BigRational::from_integer(2.into()) * &sigma * &sigma);
            let cap_value = BigRational::from_integer(16.into());
            if t >= cap_value {
                cap
            } else {
                quantize(&t, 5, p, RoundingMode::NearestEven)?.raw()
            }
        }
    };
    Ok(arg.min(cap))
}

/// Evaluates `spec` at `x = x_raw * 2^-P`, where `P` is the unit's output
/// precision.
pub fn eval_derived(
    spec: &DerivedSpec,
    x_raw: i128,
    unit: &ExpUnit,
    width: CombineWidth,
) -> Result<DerivedValue, ExpError> {
    spec.validate()?;
    let p = unit.config().out_precision;
    if let DerivedSpec::Elu { .. } = spec {
        if x_raw >= 0 {
            let raw = x_raw as u128;
            let int_bits = (128 - raw.leading_zeros()).saturating_sub(p).max(1);
            return Ok(DerivedValue {
                negative: false,
                magnitude: FixedUQ::new(raw, int_bits, p)?,
            });
        }
    }

    let arg = exp_argument(spec, x_raw, p)?;
    let input = unit.input(arg)?;
    let e = match width {
        CombineWidth::Datapath => unit.eval_wide(input)?,
        CombineWidth::Output => unit.eval(input)?,
    };
    let f = e.frac_bits();
    let one = 1u128 << f;
    let e = e.raw();
    let negative = x_raw < 0;

    let (negative, raw) = match *spec {
        DerivedSpec::Sigmoid => {
            let numer = if negative { e } else { one };
            (false, div_rne(numer << f, one + e))
        }
        DerivedSpec::Tanh => (negative && e < one, div_rne((one - e) << f, one + e)),
        DerivedSpec::Gaussian { .. } => (false, e),
        DerivedSpec::Elu { alpha } => {
            let alpha = BigRational::from_float(alpha).expect("validated finite");
            let gap = BigRational::new(BigInt::from(one - e), BigInt::from(one));
            let mag = quantize(&(alpha * gap).abs(), 64, f, RoundingMode::NearestEven)?;
            return Ok(DerivedValue {
                negative: !mag.raw().is_zero(),
                magnitude: mag,
            });
        }
    };
    Ok(DerivedValue {
        negative,
        magnitude: FixedUQ::new(raw, 1, f)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expcore::{Arithmetic, ExpConfig};

    fn unit(arith: Arithmetic) -> ExpUnit {
        ExpUnit::new(ExpConfig::new(16, 19, 19, arith)).unwrap()
    }

    fn eval(spec: DerivedSpec, x_raw: i128, u: &ExpUnit) -> DerivedValue {
        eval_derived(&spec, x_raw, u, CombineWidth::Datapath).unwrap()
    }

    #[test]
    fn trivial_points() {
        let u = unit(Arithmetic::TwosComplement);
        assert_eq!(eval(DerivedSpec::Sigmoid, 0, &u).to_f64(), 0.5);
        assert_eq!(eval(DerivedSpec::Tanh, 0, &u).to_f64(), 0.0);
        assert_eq!(eval(DerivedSpec::STANDARD_GAUSSIAN, 0, &u).to_f64(), 1.0);
        let g = DerivedSpec::Gaussian {
            mu: 1.5,
            sigma: 0.5,
        };
        assert_eq!(eval(g, 3 << 15, &u).to_f64(), 1.0);
        assert_eq!(
            eval(DerivedSpec::Elu { alpha: 1.0 }, 5 << 16, &u).to_f64(),
            5.0
        );
        assert_eq!(eval(DerivedSpec::Elu { alpha: 1.0 }, 0, &u).to_f64(), 0.0);
    }

    #[test]
    fn output_width_follows_choice() {
        let u = unit(Arithmetic::OnesComplement);
        let wide = eval_derived(&DerivedSpec::Sigmoid, 1234, &u, CombineWidth::Datapath).unwrap();
        let narrow = eval_derived(&DerivedSpec::Sigmoid, 1234, &u, CombineWidth::Output).unwrap();
        assert_eq!(wide.magnitude.frac_bits(), 19);
        assert_eq!(narrow.magnitude.frac_bits(), 16);
    }

    #[test]
    fn sigmoid_is_symmetric_and_tanh_is_odd() {
        let u = unit(Arithmetic::OnesComplement);
        let lsb = (-19f64).exp2();
        for x in (0..(16i128 << 16)).step_by(7919) {
            let a = eval(DerivedSpec::Sigmoid, x, &u).to_f64();
            let b = eval(DerivedSpec::Sigmoid, -x, &u).to_f64();
            assert!((a + b - 1.0).abs() <= lsb, "x={x}");
            let t = eval(DerivedSpec::Tanh, x, &u);
            let n = eval(DerivedSpec::Tanh, -x, &u);
            assert_eq!(t.magnitude, n.magnitude);
            assert!(!t.negative && n.negative == (x > 0), "x={x}");
        }
    }

    #[test]
    fn elu_negative_side() {
        let u = unit(Arithmetic::TwosComplement);
        let y = eval(DerivedSpec::Elu { alpha: 1.5 }, -(1 << 16), &u).to_f64();
        let want = 1.5 * ((-1.0f64).exp() - 1.0);
        assert!((y - want).abs() < 1e-5, "{y} vs {want}");
    }

    #[test]
    fn arguments_are_capped() {
        let u = unit(Arithmetic::TwosComplement);
        let a = eval(DerivedSpec::Tanh, 9 << 16, &u);
        let b = eval(DerivedSpec::Tanh, i128::MAX, &u);
        assert_eq!(a, b);
        let g = eval(DerivedSpec::STANDARD_GAUSSIAN, -(1i128 << 100), &u);
        assert_eq!(g, eval(DerivedSpec::STANDARD_GAUSSIAN, 6 << 16, &u));
    }

    #[test]
    fn invalid_parameters() {
        let u = unit(Arithmetic::TwosComplement);
        let bad = DerivedSpec::Gaussian {
            mu: 0.0,
            sigma: 0.0,
        };
        assert!(eval_derived(&bad, 0, &u, CombineWidth::Datapath).is_err());
        let bad = DerivedSpec::Elu { alpha: f64::NAN };
        assert!(eval_derived(&bad, -1, &u, CombineWidth::Datapath).is_err());
    }
}

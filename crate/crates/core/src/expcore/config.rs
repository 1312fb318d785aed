use std::fmt;
use std::str::FromStr;

use super::ExpError;

/// How `1 - t` is formed inside the series evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Arithmetic {
    /// Bitwise inversion; every subtraction from one loses exactly one lsb.
    OnesComplement,
    /// Exact subtraction.
    TwosComplement,
}

impl Arithmetic {
    pub const ALL: [Arithmetic; 2] = [Arithmetic::OnesComplement, Arithmetic::TwosComplement];

    pub fn as_str(self) -> &'static str {
        match self {
            Arithmetic::OnesComplement => "ones",
            Arithmetic::TwosComplement => "twos",
        }
    }
}

impl fmt::Display for Arithmetic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Arithmetic {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ones" | "ones_complement" => Ok(Arithmetic::OnesComplement),
            "twos" | "twos_complement" => Ok(Arithmetic::TwosComplement),
            other => Err(ExpError::Parse(format!(
                "unknown arithmetic mode `{other}`"
            ))),
        }
    }
}

/// Which polynomial approximates `e^-x` on the residual.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SeriesVariant {
    /// `1 - x(1 - x/2 (1 - 0.3125x))`, the shift-add cubic in nested form.
    ProposedCubic,
    /// `1 - q + q^2/2 - C3 q^3` with `C3 = 1365/8192`, in power form.
    PartzschCoeffs,
}

impl SeriesVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesVariant::ProposedCubic => "proposed",
            SeriesVariant::PartzschCoeffs => "partzsch",
        }
    }
}

impl fmt::Display for SeriesVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SeriesVariant {
    type Err = ExpError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "proposed" | "proposed_cubic" => Ok(SeriesVariant::ProposedCubic),
            "partzsch" | "partzsch_coeffs" => Ok(SeriesVariant::PartzschCoeffs),
            other => Err(ExpError::Parse(format!("unknown series variant `{other}`"))),
        }
    }
}

/// Smallest output precision the operand splitter supports.
pub const MIN_PRECISION: u32 = 4;
/// Largest datapath width; keeps every intermediate product inside 128 bits.
pub const MAX_DATAPATH_WIDTH: u32 = 60;

/// Full datapath configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExpConfig {
    /// Fraction bits of the input and of the output (`P`).
    pub out_precision: u32,
    /// Fraction bits kept by datapath multipliers (`M`).
    pub mult_precision: u32,
    /// Fraction bits of LUT entries (`L`).
    pub lut_precision: u32,
    pub arithmetic: Arithmetic,
    /// Fraction bits of the cubic term `T_c`.
    pub cubic_width: u32,
    /// Fraction bits of the square term `T_s`.
    pub square_width: u32,
    pub variant: SeriesVariant,
    /// Lets analysis sweeps run with `M < P` or `L < P`.
    pub allow_sub_precision: bool,
}

impl ExpConfig {
    /// Fixed word-length configuration: `T_c` and `T_s` use the full `M` bits.
    pub fn new(p: u32, m: u32, l: u32, arithmetic: Arithmetic) -> Self {
        Self {
            out_precision: p,
            mult_precision: m,
            lut_precision: l,
            arithmetic,
            cubic_width: m,
            square_width: m,
            variant: SeriesVariant::ProposedCubic,
            allow_sub_precision: false,
        }
    }

    /// P=16, M=L=17, 1's complement, fixed word length.
    pub fn headline() -> Self {
        Self::new(16, 17, 17, Arithmetic::OnesComplement)
    }

    pub fn with_term_widths(mut self, cubic: u32, square: u32) -> Self {
        self.cubic_width = cubic;
        self.square_width = square;
        self
    }

    pub fn with_variant(mut self, variant: SeriesVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn with_arithmetic(mut self, arithmetic: Arithmetic) -> Self {
        self.arithmetic = arithmetic;
        self
    }

    pub fn allowing_sub_precision(mut self) -> Self {
        self.allow_sub_precision = true;
        self
    }

    pub fn validate(&self) -> Result<(), ExpError> {
        let p = self.out_precision;
        let m = self.mult_precision;
        let l = self.lut_precision;
        if p < MIN_PRECISION {
            return Err(ExpError::PrecisionTooSmall(p));
        }
        let invalid = |what: &str| Err(ExpError::InvalidConfig(what.to_string()));
        if p > MAX_DATAPATH_WIDTH || m > MAX_DATAPATH_WIDTH || l > MAX_DATAPATH_WIDTH {
            return invalid(&format!(
                "precisions must not exceed {MAX_DATAPATH_WIDTH} bits (P={p}, M={m}, L={l})"
            ));
        }
        if m < MIN_PRECISION || l < MIN_PRECISION {
            return invalid(&format!(
                "multiplier and LUT precision must be at least {MIN_PRECISION} bits"
            ));
        }
        if !self.allow_sub_precision && (m < p || l < p) {
            return invalid(&format!(
                "multiplier ({m}) and LUT ({l}) precision must be at least P={p}"
            ));
        }
        if !(1..=m).contains(&self.cubic_width) || !(1..=m).contains(&self.square_width) {
            return invalid(&format!(
                "term widths must lie in 1..={m} (Wc={}, Ws={})",
                self.cubic_width, self.square_width
            ));
        }
        Ok(())
    }
}

impl Default for ExpConfig {
    fn default() -> Self {
        Self::headline()
    }
}

impl fmt::Display for ExpConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "P={} M={} L={} {} {} Wc={} Ws={}",
            self.out_precision,
            self.mult_precision,
            self.lut_precision,
            self.arithmetic,
            self.variant,
            self.cubic_width,
            self.square_width
        )
    }
}

use std::ops::RangeInclusive;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fxexp::derived::CombineWidth;
use fxexp::{Arithmetic, ExpConfig, SeriesVariant};

#[derive(Debug, Parser)]
#[command(
    name = "fxexp",
    version,
    about = "Bit-accurate fixed-point e^-x model and accuracy studies",
    after_help = "FXEXP_THREADS caps the number of worker threads used by sweeps."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one input and compare it with the reference.
    Eval(EvalArgs),
    /// Exhaustive error sweep of one configuration.
    Sweep(SweepArgs),
    /// Residual polynomial error, shift-add cubic vs Taylor cubic.
    Coeff(CoeffArgs),
    /// Accuracy of truncated Taylor series against input range.
    Fig1(Fig1Args),
    /// Error over a grid of multiplier and LUT precisions.
    Fig5(Fig5Args),
    /// Derived function (gaussian, sigmoid, tanh) errors.
    Table1(Table1Args),
    /// Accuracy bits for each pair of cubic and square term widths.
    Table2(Table2Args),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Ones,
    Twos,
}

impl From<Mode> for Arithmetic {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Ones => Arithmetic::OnesComplement,
            Mode::Twos => Arithmetic::TwosComplement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Variant {
    Proposed,
    Partzsch,
}

impl From<Variant> for SeriesVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Proposed => SeriesVariant::ProposedCubic,
            Variant::Partzsch => SeriesVariant::PartzschCoeffs,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Combine {
    /// Combine the M-bit exponential, round the result to M bits.
    Datapath,
    /// Combine the P-bit exponential, round the result to P bits.
    Output,
}

impl From<Combine> for CombineWidth {
    fn from(c: Combine) -> Self {
        match c {
            Combine::Datapath => CombineWidth::Datapath,
            Combine::Output => CombineWidth::Output,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Function {
    Exp,
    Sigmoid,
    Tanh,
    Gaussian,
    Elu,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    /// Input and output fraction bits.
    #[arg(long, default_value_t = 16)]
    pub p: u32,
    /// Multiplier fraction bits.
    #[arg(long, default_value_t = 17)]
    pub m: u32,
    /// LUT fraction bits.
    #[arg(long, default_value_t = 17)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = Mode::Ones)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Variant::Proposed)]
    pub variant: Variant,
    /// Cubic term fraction bits [default: M].
    #[arg(long)]
    pub wc: Option<u32>,
    /// Square term fraction bits [default: M].
    #[arg(long)]
    pub ws: Option<u32>,
}

impl ConfigArgs {
    pub fn config(&self) -> ExpConfig {
        ExpConfig::new(self.p, self.m, self.l, self.mode.into())
            .with_variant(self.variant.into())
            .with_term_widths(self.wc.unwrap_or(self.m), self.ws.unwrap_or(self.m))
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutArgs {
    /// Write CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Decimal value (rounded to nearest at P bits) or a raw integer in hex
    /// such as 0x10000.
    #[arg(long, allow_hyphen_values = true)]
    pub input: String,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = Function::Exp)]
    pub function: Function,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value_t = Combine::Datapath)]
    pub combine: Combine,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct CoeffArgs {
    #[arg(long, default_value_t = 16)]
    pub p: u32,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct Fig1Args {
    /// Series lengths: 2 linear, 3 quadratic, 4 cubic.
    #[arg(long, value_delimiter = ',', default_values_t = [2u32, 3, 4])]
    pub terms: Vec<u32>,
    /// Range exponents as lo:hi (inclusive).
    #[arg(long, default_value = "-14:0", value_parser = parse_range_i32, allow_hyphen_values = true)]
    pub range: RangeInclusive<i32>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct Fig5Args {
    #[arg(long, value_delimiter = ',', default_values_t = [8u32, 12, 16])]
    pub precisions: Vec<u32>,
    /// M - P offsets as lo:hi.
    #[arg(long, default_value = "0:4", value_parser = parse_range_u32)]
    pub m_offsets: RangeInclusive<u32>,
    /// L - P offsets as lo:hi.
    #[arg(long, default_value = "0:4", value_parser = parse_range_u32)]
    pub l_offsets: RangeInclusive<u32>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [Mode::Ones, Mode::Twos])]
    pub modes: Vec<Mode>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct Table1Args {
    #[arg(long, default_value_t = 16)]
    pub p: u32,
    /// Multiplier and LUT precisions, one configuration each.
    #[arg(long, value_delimiter = ',', default_values_t = [17u32, 19])]
    pub precisions: Vec<u32>,
    #[arg(long, value_enum, default_value_t = Mode::Ones)]
    pub mode: Mode,
    #[arg(long, value_enum, default_value_t = Combine::Datapath)]
    pub combine: Combine,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct Table2Args {
    #[arg(long, default_value_t = 16)]
    pub p: u32,
    #[arg(long, default_value_t = 17)]
    pub m: u32,
    #[arg(long, default_value_t = 17)]
    pub l: u32,
    #[arg(long, value_enum, default_value_t = Mode::Ones)]
    pub mode: Mode,
    /// Cubic term widths as lo:hi.
    #[arg(long, default_value = "5:16", value_parser = parse_range_u32)]
    pub wc: RangeInclusive<u32>,
    /// Square term widths as lo:hi.
    #[arg(long, default_value = "10:16", value_parser = parse_range_u32)]
    pub ws: RangeInclusive<u32>,
    #[command(flatten)]
    pub out: OutArgs,
}

fn parse_range<T>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    let parse = |t: &str| {
        t.trim()
            .parse::<T>()
            .map_err(|_| format!("`{t}` is not a valid bound"))
    };
    let (lo, hi) = match s.split_once(':') {
        Some((a, b)) => (parse(a)?, parse(b)?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}

fn parse_range_u32(s: &str) -> Result<RangeInclusive<u32>, String> {
    parse_range(s)
}

fn parse_range_i32(s: &str) -> Result<RangeInclusive<i32>, String> {
    parse_range(s)
}

use std::fs::File;
use std::io::{self, BufWriter, Write};

use anyhow::{Context, Result};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use fxexp::analysis::{self, SweepRow};
use fxexp::derived::{eval_derived, DerivedSpec};
use fxexp::{Arithmetic, ExpConfig, ExpError, ExpUnit};

use crate::args::{
    CoeffArgs, Command, EvalArgs, Fig1Args, Fig5Args, Function, OutArgs, SweepArgs, Table1Args,
    Table2Args,
};
use crate::input::{parse_input, GridInput};
use crate::UsageError;

pub fn run(command: Command) -> Result<()> {
    match command {
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Coeff(a) => coeff(a),
        Command::Fig1(a) => fig1(a),
        Command::Fig5(a) => fig5(a),
        Command::Table1(a) => table1(a),
        Command::Table2(a) => table2(a),
    }
}

/// Configuration problems are the caller's fault; everything else is not.
fn classify(err: ExpError) -> anyhow::Error {
    match err {
        ExpError::PrecisionTooSmall(_)
        | ExpError::InvalidConfig(_)
        | ExpError::InputFormat { .. }
        | ExpError::Parse(_) => UsageError(err.to_string()).into(),
        other => other.into(),
    }
}

fn unit_for(cfg: ExpConfig) -> Result<ExpUnit> {
    ExpUnit::new(cfg).map_err(classify)
}

fn with_output(out: &OutArgs, write: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match &out.out {
        Some(path) => {
            let file =
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
            let mut w = BufWriter::new(file);
            write(&mut w)?;
            w.flush()
                .with_context(|| format!("cannot write {}", path.display()))
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            write(&mut w)?;
            w.flush().context("cannot write to standard output")
        }
    }
}

fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

fn exact_exp_neg(t: &BigRational) -> BigRational {
    analysis::oracle_exp_neg(t).to_rational()
}

/// Reference value of the selected function at the exact grid input.
fn reference(spec: Option<&DerivedSpec>, x: &BigRational) -> BigRational {
    let one = BigRational::one();
    let abs = x.abs();
    match spec {
        None => exact_exp_neg(x),
        Some(DerivedSpec::Sigmoid) => {
            let e = exact_exp_neg(&abs);
            if x.is_negative() {
                &e / (&one + &e)
            } else {
                &one / (&one + &e)
            }
        }
        Some(DerivedSpec::Tanh) => {
            let e = exact_exp_neg(&(&abs * BigRational::from_integer(2.into())));
            let mag = (&one - &e) / (&one + &e);
            if x.is_negative() {
                -mag
            } else {
                mag
            }
        }
        Some(DerivedSpec::Gaussian { mu, sigma }) => {
            let mu = BigRational::from_float(*mu).unwrap_or_default();
            let sigma = BigRational::from_float(*sigma).unwrap_or_else(BigRational::one);
            let d = x - mu;
            exact_exp_neg(&(&d * &d / (BigRational::from_integer(2.into()) * &sigma * &sigma)))
        }
        Some(DerivedSpec::Elu { alpha }) => {
            if x.is_negative() {
                let alpha = BigRational::from_float(*alpha).unwrap_or_default();
                alpha * (exact_exp_neg(&abs) - one)
            } else {
                x.clone()
            }
        }
    }
}

fn eval(a: EvalArgs) -> Result<()> {
    let cfg = a.config.config();
    cfg.validate().map_err(classify)?;
    let p = cfg.out_precision;
    let input: GridInput = parse_input(&a.input, p)?;
    let unit = unit_for(cfg)?;
    let x = input.rational(p);

    let spec = match a.function {
        Function::Exp => None,
        Function::Sigmoid => Some(DerivedSpec::Sigmoid),
        Function::Tanh => Some(DerivedSpec::Tanh),
        Function::Gaussian => Some(DerivedSpec::Gaussian {
            mu: a.mu,
            sigma: a.sigma,
        }),
        Function::Elu => Some(DerivedSpec::Elu { alpha: a.alpha }),
    };

    let sign = if input.negative { "-" } else { "" };
    let mut out = String::new();
    out += &format!("function   {}\n", spec.map_or("exp", |s| s.name()));
    out += &format!("config     {cfg}\n");
    out += &format!(
        "input      {sign}{:#x} = {:?}\n",
        input.raw,
        rational_to_f64(&x)
    );

    let (result, value) = match &spec {
        None => {
            if input.negative {
                return Err(UsageError("exp takes a non-negative input".into()).into());
            }
            let y = unit.eval(unit.input(input.raw).map_err(classify)?)?;
            (
                format!("{:#x} (u{}.{})", y.raw(), y.int_bits(), y.frac_bits()),
                y.to_rational(),
            )
        }
        Some(spec) => {
            spec.validate().map_err(classify)?;
            let y = eval_derived(spec, input.signed_raw()?, &unit, a.combine.into())
                .map_err(classify)?;
            let sign = if y.negative { "-" } else { "" };
            let mag = y.magnitude;
            let value = if y.negative {
                -mag.to_rational()
            } else {
                mag.to_rational()
            };
            (
                format!(
                    "{sign}{:#x} (u{}.{})",
                    mag.raw(),
                    mag.int_bits(),
                    mag.frac_bits()
                ),
                value,
            )
        }
    };
    let want = reference(spec.as_ref(), &x);
    let ulps = (&value - &want).abs() * BigRational::from_integer((1u128 << p).into());
    out += &format!("result     {result} = {:?}\n", rational_to_f64(&value));
    out += &format!("oracle     {:?}\n", rational_to_f64(&want));
    out += &format!(
        "error_ulps {}\n",
        analysis::fmt_float(rational_to_f64(&ulps))
    );
    print!("{out}");
    Ok(())
}

fn csv_err<E: std::error::Error + Send + Sync + 'static>(e: E) -> anyhow::Error {
    anyhow::Error::new(e).context("cannot write CSV")
}

fn sweep(a: SweepArgs) -> Result<()> {
    let unit = unit_for(a.config.config())?;
    let report = analysis::sweep_unit(&unit).map_err(classify)?;
    let rows = [SweepRow {
        config: *unit.config(),
        report,
    }];
    with_output(&a.out, |w| {
        analysis::write_sweep_csv(w, &rows).map_err(csv_err)
    })
}

fn coeff(a: CoeffArgs) -> Result<()> {
    let rows = analysis::coeff_error_scan(a.p).map_err(classify)?;
    with_output(&a.out, |w| {
        analysis::write_coeff_csv(w, &rows).map_err(csv_err)
    })
}

fn fig1(a: Fig1Args) -> Result<()> {
    let rows = analysis::series_range_table(&a.terms, a.range.clone()).map_err(classify)?;
    with_output(&a.out, |w| {
        analysis::write_fig1_csv(w, &rows).map_err(csv_err)
    })
}

fn fig5(a: Fig5Args) -> Result<()> {
    let modes: Vec<Arithmetic> = a.modes.iter().map(|&m| m.into()).collect();
    let rows = analysis::mult_lut_sweep(
        &a.precisions,
        a.m_offsets.clone(),
        a.l_offsets.clone(),
        &modes,
    )
    .map_err(classify)?;
    with_output(&a.out, |w| {
        analysis::write_sweep_csv(w, &rows).map_err(csv_err)
    })
}

fn table1(a: Table1Args) -> Result<()> {
    let configs: Vec<ExpConfig> = a
        .precisions
        .iter()
        .map(|&m| ExpConfig::new(a.p, m, m, a.mode.into()))
        .collect();
    for c in &configs {
        c.validate().map_err(classify)?;
    }
    let rows = analysis::derived_error_table(&configs, a.combine.into()).map_err(classify)?;
    with_output(&a.out, |w| {
        analysis::write_table1_csv(w, &rows).map_err(csv_err)
    })
}

fn table2(a: Table2Args) -> Result<()> {
    let base = ExpConfig::new(a.p, a.m, a.l, a.mode.into());
    base.validate().map_err(classify)?;
    let wcs: Vec<u32> = a.wc.clone().collect();
    let wss: Vec<u32> = a.ws.clone().collect();
    let table = analysis::term_precision_table(&base, &wcs, &wss).map_err(classify)?;
    with_output(&a.out, |w| {
        analysis::write_table2_csv(w, &table).map_err(csv_err)
    })
}

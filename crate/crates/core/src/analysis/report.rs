//! CSV writers. Every file starts with a header row; floats use scientific
//! notation with ten significant digits.

use std::io::Write;

use super::studies::{CoeffReport, DerivedRow, RangeReport, SweepRow, TermPrecisionTable};

pub const SWEEP_HEADER: [&str; 11] = [
    "p",
    "m",
    "l",
    "mode",
    "variant",
    "wc",
    "ws",
    "max_abs_err",
    "max_ulps",
    "argmax_raw",
    "samples",
];
pub const TABLE2_HEADER: [&str; 3] = ["wc", "ws", "accuracy_bits"];
pub const FIG1_HEADER: [&str; 4] = ["terms", "range_pow", "max_abs_err", "accuracy_bits"];
pub const TABLE1_HEADER: [&str; 4] = ["function", "precision", "max_abs_err", "ulps"];
pub const COEFF_HEADER: [&str; 6] = [
    "polynomial",
    "p",
    "max_abs_err",
    "max_ulps",
    "argmax_x",
    "samples",
];

pub fn fmt_float(x: f64) -> String {
    format!("{x:.9e}")
}

fn writer<W: Write>(out: W, header: &[&str]) -> csv::Result<csv::Writer<W>> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    Ok(w)
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = writer(out, &SWEEP_HEADER)?;
    for SweepRow {
        config: c,
        report: r,
    } in rows
    {
        w.write_record([
            c.out_precision.to_string(),
            c.mult_precision.to_string(),
            c.lut_precision.to_string(),
            c.arithmetic.to_string(),
            c.variant.to_string(),
            c.cubic_width.to_string(),
            c.square_width.to_string(),
            fmt_float(r.max_abs_error),
            fmt_float(r.max_ulps),
            r.argmax_input.to_string(),
            r.samples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table2_csv<W: Write>(out: W, table: &TermPrecisionTable) -> csv::Result<()> {
    let mut w = writer(out, &TABLE2_HEADER)?;
    for (i, wc) in table.cubic_widths.iter().enumerate() {
        for (j, ws) in table.square_widths.iter().enumerate() {
            w.write_record([
                wc.to_string(),
                ws.to_string(),
                table.reports[i][j].accuracy_bits().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_fig1_csv<W: Write>(out: W, rows: &[RangeReport]) -> csv::Result<()> {
    let mut w = writer(out, &FIG1_HEADER)?;
    for r in rows {
        w.write_record([
            r.terms.to_string(),
            r.range_pow.to_string(),
            fmt_float(r.max_abs_error),
            r.accuracy.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table1_csv<W: Write>(out: W, rows: &[DerivedRow]) -> csv::Result<()> {
    let mut w = writer(out, &TABLE1_HEADER)?;
    for r in rows {
        w.write_record([
            r.function.name().to_string(),
            r.precision.to_string(),
            fmt_float(r.max_abs_error),
            fmt_float(r.ulps),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_coeff_csv<W: Write>(out: W, rows: &[CoeffReport]) -> csv::Result<()> {
    let mut w = writer(out, &COEFF_HEADER)?;
    for r in rows {
        let argmax_x = r.argmax_index as f64 * (-(r.precision as f64)).exp2();
        w.write_record([
            r.polynomial.name().to_string(),
            r.precision.to_string(),
            fmt_float(r.max_abs_error),
            fmt_float(r.max_abs_error * (r.precision as f64).exp2()),
            fmt_float(argmax_x),
            r.samples.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

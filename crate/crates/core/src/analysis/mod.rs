//! Reference values, exhaustive error sweeps and the data behind every
//! accuracy study.
//!
//! Errors are measured against a 124-bit reference. Sweeps run on the rayon
//! pool; their reductions pick the smallest input among equal errors, so
//! results do not depend on the thread count.

mod oracle;
mod report;
mod studies;
mod sweep;

pub use oracle::{
    oracle_exp_neg, oracle_exp_neg_raw, oracle_table, OracleTable, MAX_SWEEP_PRECISION,
};
pub use report::{
    fmt_float, write_coeff_csv, write_fig1_csv, write_sweep_csv, write_table1_csv,
    write_table2_csv, COEFF_HEADER, FIG1_HEADER, SWEEP_HEADER, TABLE1_HEADER, TABLE2_HEADER,
};
pub use studies::{
    coeff_error_scan, derived_domain, derived_error, derived_error_table, mult_lut_sweep,
    series_range_error, series_range_table, term_precision_table, CoeffReport, DerivedRow,
    RangeReport, ResidualPolynomial, SweepRow, TermPrecisionTable, DERIVED_TABLE_FUNCTIONS,
    RANGE_GRID_BITS,
};
pub use sweep::{saturation_spot_inputs, sweep_error, sweep_unit, AccuracyBits, ErrorReport};

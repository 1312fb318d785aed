use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_rational::BigRational;
use rayon::prelude::*;

use crate::hiprec::{self, ScaledWide, Wide};

/// Largest `P` for which exhaustive sweeps (and their oracle tables) are
/// supported; `16 * 2^P` reference values are kept in memory.
pub const MAX_SWEEP_PRECISION: u32 = 22;

/// Reference `e^-a` for an exact non-negative rational.
///
/// The result is accurate to far better than `2^-60` relative error.
pub fn oracle_exp_neg(a: &BigRational) -> ScaledWide {
    hiprec::exp_neg_rational(a)
}

/// Reference `e^-(raw * 2^-p)` on the fixed-point grid `2^-124`.
pub fn oracle_exp_neg_raw(raw: u128, p: u32) -> Wide {
    hiprec::exp_neg_dyadic(raw, p).to_wide()
}

/// Reference values for every raw input in `[0, 16 * 2^P)`.
#[derive(Debug)]
pub struct OracleTable {
    pub precision: u32,
    values: Vec<Wide>,
}

impl OracleTable {
    fn build(precision: u32) -> Self {
        let n = 16usize << precision;
        let values = (0..n)
            .into_par_iter()
            .map(|raw| oracle_exp_neg_raw(raw as u128, precision))
            .collect();
        Self { precision, values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, raw: u128) -> Wide {
        if raw < self.values.len() as u128 {
            self.values[raw as usize]
        } else {
            oracle_exp_neg_raw(raw, self.precision)
        }
    }
}

/// Shared reference table for precision `p`, built on first use.
///
/// # Panics
///
/// Panics if `p` exceeds [`MAX_SWEEP_PRECISION`].
pub fn oracle_table(p: u32) -> Arc<OracleTable> {
    assert!(
        p <= MAX_SWEEP_PRECISION,
        "no oracle table above P={MAX_SWEEP_PRECISION}"
    );
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<OracleTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().unwrap().get(&p) {
        return Arc::clone(t);
    }
    // Built outside the lock so other precisions are not blocked; a racing
    // duplicate build yields identical contents.
    let table = Arc::new(OracleTable::build(p));
    let mut guard = cache.lock().unwrap();
    Arc::clone(guard.entry(p).or_insert(table))
}

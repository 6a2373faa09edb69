//! Census over a trace table: almost-prime trace counts, the attached
//! constants, sieve functionals, and diagnostics, bundled into a
//! deterministic JSON-serializable report.
//!
//! Counting semantics are over primes p: each good p contributes one record,
//! so repeated trace values count with multiplicity. The gcd(a_p, m_E) = 1
//! filter applies only to the sieve-side multiset and its reported size;
//! the headline counts use every good prime.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize, ArithError};
use crate::frobenius::{build_trace_table, BuildMethod, CurveSpec, FrobeniusError, TraceTable};
use crate::gl2::{
    conjecture_constant, half_trace_constant, ConstantsReport, GaloisImage, Gl2Error,
    MAX_ENUM_LEVEL,
};
use crate::sieve::{
    empirical_rd, minimal_r, sifted_count, weighted_h, GreavesParams, SieveData, SieveError,
};

#[derive(Debug, Error)]
pub enum CensusError {
    #[error("{0}")]
    Domain(&'static str),
    #[error(transparent)]
    Frobenius(#[from] FrobeniusError),
    #[error(transparent)]
    Gl2(#[from] Gl2Error),
    #[error(transparent)]
    Sieve(#[from] SieveError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// `#{p: |a_p| prime}`, one count per record.
pub fn prime_trace_count(table: &TraceTable) -> Result<u64, CensusError> {
    let mut count = 0;
    for rec in table.records() {
        let n = rec.a_p.unsigned_abs();
        if n >= 2 && factorize(n)?.is_prime() {
            count += 1;
        }
    }
    Ok(count)
}

/// `#{p: omega(|a_p|) <= k, a_p not in {0, 1, -1}}`.
pub fn qk_count(table: &TraceTable, k: u64) -> Result<u64, CensusError> {
    if k < 1 {
        return Err(CensusError::Domain("k must be >= 1"));
    }
    let mut count = 0;
    for rec in table.records() {
        let n = rec.a_p.unsigned_abs();
        if n >= 2 && u64::from(factorize(n)?.omega()) <= k {
            count += 1;
        }
    }
    Ok(count)
}

/// `#{p: Omega(|a_p|) <= k, a_p not in {0, 1, -1}}`.
pub fn pk_count(table: &TraceTable, k: u64) -> Result<u64, CensusError> {
    if k < 1 {
        return Err(CensusError::Domain("k must be >= 1"));
    }
    let mut count = 0;
    for rec in table.records() {
        let n = rec.a_p.unsigned_abs();
        if n >= 2 && u64::from(factorize(n)?.big_omega()) <= k {
            count += 1;
        }
    }
    Ok(count)
}

/// `#{p: a_p even and |a_p|/2 prime}`.
pub fn half_trace_prime_count(table: &TraceTable) -> Result<u64, CensusError> {
    let mut count = 0;
    for rec in table.records() {
        let n = rec.a_p.unsigned_abs();
        if n >= 4 && n % 2 == 0 && factorize(n / 2)?.is_prime() {
            count += 1;
        }
    }
    Ok(count)
}

/// Exact count of records with `a_p = alpha`; Lang-Trotter diagnostic.
pub fn fixed_trace_count(table: &TraceTable, alpha: i64) -> u64 {
    table.records().iter().filter(|r| r.a_p == alpha).count() as u64
}

/// `sum 1/p` over records with `p >= x0` and `|a_p|` prime.
pub fn reciprocal_partial_sum(table: &TraceTable, x0: f64) -> Result<f64, CensusError> {
    if !(x0 >= 2.0) {
        return Err(CensusError::Domain("x0 must be at least 2"));
    }
    let mut sum = 0.0;
    for rec in table.records() {
        if (rec.p as f64) < x0 {
            continue;
        }
        let n = rec.a_p.unsigned_abs();
        if n >= 2 && factorize(n)?.is_prime() {
            sum += 1.0 / rec.p as f64;
        }
    }
    Ok(sum)
}

/// `pi_prime(x) (log x)^2 / (C x)`: tends to 1 under the conjectural
/// asymptotic. Report-only.
pub fn conjecture_ratio(table: &TraceTable, c: f64) -> Result<f64, CensusError> {
    let x = table.x() as f64;
    if !(x > std::f64::consts::E) {
        return Err(CensusError::Domain("conjecture_ratio requires x > e"));
    }
    if !(c > 0.0) {
        return Err(CensusError::Domain("conjecture_ratio requires C > 0"));
    }
    let pi = prime_trace_count(table)? as f64;
    Ok(pi * x.ln() * x.ln() / (c * x))
}

/// Image supplied to the census for the constants block.
#[derive(Debug, Clone)]
pub enum ImageOption {
    /// No image: the constants block is omitted.
    None,
    /// Full GL2 image at the given (even) level; also computes C' from the
    /// full image one level up when enumeration allows.
    FullLevel(u64),
    /// An explicit image at its own level; C' is left unset.
    Explicit(GaloisImage),
}

/// Census configuration. Defaults: auto method, one worker, m_E = 2,
/// theta = 1/2, k up to 8, reciprocal sums from x0 = 2, constants to 1e-8.
#[derive(Debug, Clone)]
pub struct CensusOptions {
    pub method: BuildMethod,
    pub workers: usize,
    pub m_e: u64,
    pub theta: f64,
    pub k_max: u64,
    pub x0: f64,
    pub tol: f64,
    pub image: ImageOption,
    pub sieve_params: Option<GreavesParams>,
    pub empirical_ds: Vec<u64>,
    /// Reuse a prebuilt table instead of computing; must match curve and x.
    pub table: Option<TraceTable>,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            method: BuildMethod::Auto,
            workers: 1,
            m_e: 2,
            theta: 0.5,
            k_max: 8,
            x0: 2.0,
            tol: 1e-8,
            image: ImageOption::None,
            sieve_params: None,
            empirical_ds: vec![1, 3, 5],
            table: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveBlock {
    #[serde(rename = "A")]
    pub a: i64,
    #[serde(rename = "B")]
    pub b: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CountsBlock {
    pub prime: u64,
    pub q: BTreeMap<u64, u64>,
    pub p: BTreeMap<u64, u64>,
    pub half_prime: u64,
    pub zero: u64,
    pub unit: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SieveBlock {
    #[serde(rename = "m_E")]
    pub m_e: u64,
    pub gcd_filtered_size: u64,
    #[serde(rename = "S")]
    pub s: u64,
    #[serde(rename = "H")]
    pub h: f64,
    pub params: GreavesParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsBlock {
    pub ratio: f64,
    pub reciprocal_partial: f64,
    #[serde(rename = "empirical_Rd")]
    pub empirical_rd: BTreeMap<u64, f64>,
    /// Good primes are taken as p not dividing 2(4A^3 + 27B^2), a conductor
    /// proxy; counts can shift by O(1) against the p | N_E convention.
    pub note: &'static str,
}

const GOOD_PRIME_NOTE: &str =
    "good primes approximate p not dividing the conductor via the discriminant; O(1) shift";

#[derive(Debug, Clone, Serialize)]
pub struct CensusReport {
    pub curve: CurveBlock,
    pub x: u64,
    pub counts: CountsBlock,
    pub sieve: SieveBlock,
    pub constants: Option<ConstantsReport>,
    pub diagnostics: DiagnosticsBlock,
}

impl CensusReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Default sieve parameters when none are supplied: the greaves_Q ramp
/// (U, V) = (0.83, 1/6) with xi = (1 - theta)/3, the data-usable level
/// `z = x^xi` (the literal recipe z collapses below 1 at desk scale), and
/// the smallest r satisfying the lemma's max hypothesis.
fn derived_sieve_params(
    data: &SieveData,
    x: u64,
    theta: f64,
) -> Result<GreavesParams, CensusError> {
    if !(0.5..1.0).contains(&theta) {
        return Err(CensusError::Domain("theta must lie in [1/2, 1)"));
    }
    let xi = (1.0 - theta) / 3.0;
    let z = (x.max(2) as f64).powf(xi);
    let max_abs = data
        .values()
        .iter()
        .map(|a| a.unsigned_abs())
        .max()
        .unwrap_or(0);
    let r = minimal_r(z, 0.83, 1.0 / 6.0, max_abs)?;
    Ok(GreavesParams {
        u: 0.83,
        v: 1.0 / 6.0,
        z,
        theta,
        xi,
        r,
    })
}

/// Runs the full census. Deterministic: the same inputs (worker count
/// included or not) produce byte-identical JSON.
pub fn build_report(
    curve: &CurveSpec,
    x: u64,
    options: &CensusOptions,
) -> Result<CensusReport, CensusError> {
    if options.k_max < 1 {
        return Err(CensusError::Domain("k_max must be >= 1"));
    }
    let table = match &options.table {
        Some(t) => {
            if *t.curve() != *curve || t.x() != x {
                return Err(CensusError::Domain(
                    "cached table does not match the requested curve and range",
                ));
            }
            t.clone()
        }
        None => build_trace_table(curve, x, options.method, options.workers)?,
    };

    let prime = prime_trace_count(&table)?;
    let mut q = BTreeMap::new();
    let mut p = BTreeMap::new();
    for k in 1..=options.k_max {
        q.insert(k, qk_count(&table, k)?);
        p.insert(k, pk_count(&table, k)?);
    }
    let counts = CountsBlock {
        prime,
        q,
        p,
        half_prime: half_trace_prime_count(&table)?,
        zero: fixed_trace_count(&table, 0),
        unit: fixed_trace_count(&table, 1) + fixed_trace_count(&table, -1),
    };

    let data = SieveData::from_table(&table, options.m_e)?;
    let params = match options.sieve_params {
        Some(p) => p,
        None => derived_sieve_params(&data, x, options.theta)?,
    };
    let sieve = SieveBlock {
        m_e: options.m_e,
        gcd_filtered_size: data.len() as u64,
        s: sifted_count(&data, params.z)?,
        h: weighted_h(&data, &params)?,
        params,
    };

    let constants = match &options.image {
        ImageOption::None => None,
        ImageOption::FullLevel(m) => {
            let image = GaloisImage::full(*m)?;
            let mut report = conjecture_constant(&image, options.tol)?;
            if 2 * m <= MAX_ENUM_LEVEL {
                let image2 = GaloisImage::full(2 * m)?;
                report.cprime = Some(half_trace_constant(&image2, *m, options.tol)?);
            }
            Some(report)
        }
        ImageOption::Explicit(image) => Some(conjecture_constant(image, options.tol)?),
    };

    let lx = (x as f64).ln();
    let ratio = if x >= 2 {
        prime as f64 * lx * lx / x as f64
    } else {
        0.0
    };
    let mut empirical = BTreeMap::new();
    if let Some(c) = &constants {
        for &d in &options.empirical_ds {
            empirical.insert(d, empirical_rd(&data, c.c1, x as f64, d)?);
        }
    }
    let diagnostics = DiagnosticsBlock {
        ratio,
        reciprocal_partial: reciprocal_partial_sum(&table, options.x0)?,
        empirical_rd: empirical,
        note: GOOD_PRIME_NOTE,
    };

    Ok(CensusReport {
        curve: CurveBlock {
            a: table.curve().a(),
            b: table.curve().b(),
        },
        x,
        counts,
        sieve,
        constants,
        diagnostics,
    })
}

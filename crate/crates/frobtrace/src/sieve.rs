//! Greaves lower-bound sieve numerics (alpha, beta, J, parameter solving)
//! and the data-side functionals on trace multisets: w(d), the sifted count
//! S, the weights g and script-G, the weighted sum H, and empirical
//! remainders R_d.
//!
//! The functional side is pure real analysis: smooth integrals evaluated by
//! composite Gauss-Legendre quadrature with a refinement check. The data
//! side consumes a [`SieveData`] multiset (Frobenius traces after the
//! `gcd(a, m_E) = 1` filter) and never assumes anything conjectural; the one
//! hard assertion, in [`check_lower_lemma`], is an unconditional
//! combinatorial theorem.

use std::fmt;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{factorize, primes_up_to, ArithError};
use crate::frobenius::TraceTable;

/// Lower admissibility threshold for V in the weighted sieve.
pub const V0: f64 = 0.074368;

/// J(0.83, 1/6), the leading functional value for the Q_r lower bound.
pub const J_LOWER_Q: f64 = 0.00692;

/// J(3/5, 1/4), the leading functional value for the P_r lower bound.
pub const J_LOWER_P: f64 = 0.3162;

/// Solved U with J(U, 1/4) = 1/2, used by the PCC-mode recipe.
pub const PCC_U: f64 = 0.511_128_6;

/// Slack for window comparisons on rounded decimal inputs.
const SLACK: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("{0}")]
    Domain(&'static str),
    #[error("{0}")]
    Solver(&'static str),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Composite Gauss-Legendre quadrature. Nodes are computed once by Newton
/// iteration on the Legendre recurrence and cached.
mod quad {
    use std::sync::OnceLock;

    const N: usize = 32;

    fn nodes() -> &'static [(f64, f64); N] {
        static CACHE: OnceLock<[(f64, f64); N]> = OnceLock::new();
        CACHE.get_or_init(|| {
            let mut out = [(0.0f64, 0.0f64); N];
            let n = N as f64;
            for i in 1..=N.div_ceil(2) {
                let mut z = (std::f64::consts::PI * (i as f64 - 0.25) / (n + 0.5)).cos();
                let mut pp = 0.0;
                for _ in 0..100 {
                    // Legendre recurrence up to degree N, then the derivative.
                    let mut p1 = 1.0;
                    let mut p2 = 0.0;
                    for j in 1..=N {
                        let p3 = p2;
                        p2 = p1;
                        let jf = j as f64;
                        p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
                    }
                    pp = n * (z * p1 - p2) / (z * z - 1.0);
                    let z1 = z;
                    z = z1 - p1 / pp;
                    if (z - z1).abs() < 1e-15 {
                        break;
                    }
                }
                let w = 2.0 / ((1.0 - z * z) * pp * pp);
                out[i - 1] = (-z, w);
                out[N - i] = (z, w);
            }
            out
        })
    }

    pub(super) fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for k in 0..panels {
            let mid = a + (k as f64 + 0.5) * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for &(x, w) in nodes() {
                acc += w * f(mid + half * x);
            }
            total += acc * half;
        }
        total
    }

    /// Integrates at two panel counts; returns the finer value and the
    /// absolute disagreement as the error estimate.
    pub(super) fn integrate_checked<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
        let coarse = integrate(f, a, b, 2);
        let fine = integrate(f, a, b, 4);
        (fine, (fine - coarse).abs())
    }

    #[cfg(test)]
    pub(super) fn weight_sum() -> f64 {
        nodes().iter().map(|&(_, w)| w).sum()
    }
}

fn check_window(v: f64) -> Result<(), SieveError> {
    if !(1.0 / 6.0 - SLACK..=0.25 + SLACK).contains(&v) {
        return Err(SieveError::Domain("V must lie in [1/6, 1/4]"));
    }
    Ok(())
}

fn check_theta(theta: f64) -> Result<(), SieveError> {
    if !(0.5..1.0).contains(&theta) {
        return Err(SieveError::Domain("theta must lie in [1/2, 1)"));
    }
    Ok(())
}

/// The two simplified integrals shared by alpha and beta, with quadrature
/// error estimates. The integrand is smooth on [4, 1/V]: log(u - 3)
/// vanishes at the left endpoint and 2 - uV >= 1 throughout.
fn dawu_integrals(v: f64) -> (f64, f64, f64) {
    let upper = 1.0 / v;
    if upper <= 4.0 {
        return (0.0, 0.0, 0.0);
    }
    let kernel = move |u: f64| (u - 3.0).ln() / (u - 2.0);
    let shared = move |u: f64| ((1.0 - 1.0 / u) / (1.0 - v)).ln();
    let fa = move |u: f64| ((2.0 / u) * (2.0 - u * v).ln() + shared(u)) * kernel(u);
    let fb = move |u: f64| ((2.0 - u * v).ln() + shared(u)) * kernel(u);
    let (ia, ea) = quad::integrate_checked(&fa, 4.0, upper);
    let (ib, eb) = quad::integrate_checked(&fb, 4.0, upper);
    (ia, ib, ea.max(eb))
}

/// alpha(V) on the validity window [1/6, 1/4]; exactly 0 at V = 1/4.
pub fn alpha_of(v: f64) -> Result<f64, SieveError> {
    check_window(v)?;
    let (ia, _, _) = dawu_integrals(v);
    Ok((4.0 * (1.0 - v) / 3.0).ln() - ia)
}

/// beta(V) on the validity window [1/6, 1/4]; exactly 0 at V = 1/4.
pub fn beta_of(v: f64) -> Result<f64, SieveError> {
    check_window(v)?;
    let (_, ib, _) = dawu_integrals(v);
    Ok(((1.0 - v) / (3.0 * v)).ln() - ib)
}

/// alpha, beta, and J together with the quadrature error estimate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GreavesValues {
    pub alpha: f64,
    pub beta: f64,
    #[serde(rename = "J")]
    pub j: f64,
    pub quadrature_error_estimate: f64,
}

/// Evaluates alpha(V), beta(V), and the sieve functional
/// `J(U, V) = (U log(1/U) + (1-U) log(1/(1-U)) - log(4/3)
///            + alpha(V) - V log 3 - V beta(V)) / (U - V)`.
pub fn greaves_values(u: f64, v: f64) -> Result<GreavesValues, SieveError> {
    check_window(v)?;
    if !(u > 0.0 && u < 1.0) {
        return Err(SieveError::Domain("U must lie in (0, 1)"));
    }
    if (u - v).abs() < 1e-12 {
        return Err(SieveError::Domain("J is undefined at U = V"));
    }
    let (ia, ib, err) = dawu_integrals(v);
    let alpha = (4.0 * (1.0 - v) / 3.0).ln() - ia;
    let beta = ((1.0 - v) / (3.0 * v)).ln() - ib;
    let numerator = u * (1.0 / u).ln() + (1.0 - u) * (1.0 / (1.0 - u)).ln()
        - (4.0f64 / 3.0).ln()
        + alpha
        - v * 3.0f64.ln()
        - v * beta;
    Ok(GreavesValues {
        alpha,
        beta,
        j: numerator / (u - v),
        quadrature_error_estimate: err,
    })
}

/// The sieve functional J(U, V) alone.
pub fn j_of(u: f64, v: f64) -> Result<f64, SieveError> {
    Ok(greaves_values(u, v)?.j)
}

/// Solves J(U, V) = target for U by bisection; the bracket endpoints must
/// straddle the target (J is strictly decreasing in U on the working
/// range, so any straddling bracket isolates exactly one root).
pub fn solve_u(v: f64, target: f64, bracket: (f64, f64)) -> Result<f64, SieveError> {
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) {
        return Err(SieveError::Domain("bracket must satisfy lo < hi"));
    }
    let flo = j_of(lo, v)? - target;
    let fhi = j_of(hi, v)? - target;
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(SieveError::Solver("J - target does not change sign on the bracket"));
    }
    let lo_sign = flo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fmid = j_of(mid, v)? - target;
        if fmid.abs() <= 1e-9 || hi - lo < 1e-15 {
            return Ok(mid);
        }
        if fmid.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(SieveError::Solver("bisection failed to converge"))
}

/// `r1 = 1 + floor((1/0.83) (3/(2(1-theta)) - 1/6))`, the Q_r exponent.
pub fn r1_of(theta: f64) -> Result<u64, SieveError> {
    check_theta(theta)?;
    Ok(1 + ((3.0 / (2.0 * (1.0 - theta)) - 1.0 / 6.0) / 0.83).floor() as u64)
}

/// `r2 = 1 + floor(5/(2(1-theta)) - 5/12)`, the P_r exponent.
pub fn r2_of(theta: f64) -> Result<u64, SieveError> {
    check_theta(theta)?;
    Ok(1 + (5.0 / (2.0 * (1.0 - theta)) - 5.0 / 12.0).floor() as u64)
}

/// `w(d) = prod_{l | d} l^2/(l^2 - 1)`, exact; requires d squarefree and
/// coprime to m_E.
pub fn density_w(d: u64, m_e: u64) -> Result<Ratio<u128>, SieveError> {
    if d == 0 {
        return Err(SieveError::Domain("w(d) requires d >= 1"));
    }
    let f = factorize(d)?;
    if !f.is_squarefree() {
        return Err(SieveError::Domain("w(d) requires squarefree d"));
    }
    if num_integer::gcd(d, m_e) != 1 {
        return Err(SieveError::Domain("w(d) requires gcd(d, m_E) = 1"));
    }
    let mut w = Ratio::from_integer(1u128);
    for &(l, _) in f.factors() {
        let l2 = l as u128 * l as u128;
        w *= Ratio::new(l2, l2 - 1);
    }
    Ok(w)
}

/// Sieve parameter bundle: ramp exponents U and V, sifting level z, the
/// quasi-GRH exponent theta, the scale exponent xi, and the factor budget r.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreavesParams {
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub z: f64,
    pub theta: f64,
    pub xi: f64,
    pub r: u64,
}

impl GreavesParams {
    /// Checks the admissibility constraints. Literal recipes at desk-scale x
    /// can fail the `z > 1` check; see [`parameter_recipe`].
    pub fn validate(&self) -> Result<(), SieveError> {
        if !(self.v > V0) {
            return Err(SieveError::Domain("V must exceed V0 = 0.074368"));
        }
        if !(self.v < self.u) {
            return Err(SieveError::Domain("V < U is required"));
        }
        if self.v > 0.25 + SLACK {
            return Err(SieveError::Domain("V must be at most 1/4"));
        }
        if self.u < 0.5 - SLACK {
            return Err(SieveError::Domain("U must be at least 1/2"));
        }
        if self.u + 3.0 * self.v < 1.0 - 1e-12 {
            return Err(SieveError::Domain("U + 3V >= 1 is required"));
        }
        if !(self.z > 1.0) {
            return Err(SieveError::Domain("z must exceed 1"));
        }
        check_theta(self.theta)?;
        if !(self.xi > 0.0 && self.xi < 1.0) {
            return Err(SieveError::Domain("xi must lie in (0, 1)"));
        }
        if self.r < 1 {
            return Err(SieveError::Domain("r must be a positive integer"));
        }
        Ok(())
    }
}

/// Parameter recipe selector; see [`parameter_recipe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SieveMode {
    Selberg,
    GreavesQ,
    GreavesP,
    Pcc,
}

impl std::str::FromStr for SieveMode {
    type Err = SieveError;

    fn from_str(s: &str) -> Result<Self, SieveError> {
        match s {
            "selberg" => Ok(SieveMode::Selberg),
            "greaves_Q" => Ok(SieveMode::GreavesQ),
            "greaves_P" => Ok(SieveMode::GreavesP),
            "pcc" => Ok(SieveMode::Pcc),
            _ => Err(SieveError::Domain(
                "unknown mode; expected selberg, greaves_Q, greaves_P, or pcc",
            )),
        }
    }
}

impl fmt::Display for SieveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SieveMode::Selberg => "selberg",
            SieveMode::GreavesQ => "greaves_Q",
            SieveMode::GreavesP => "greaves_P",
            SieveMode::Pcc => "pcc",
        })
    }
}

/// The literal parameter assignments per mode:
///
/// * `selberg`: `z = x^((1-theta)/6)/(log x)^2`, ramp (0.83, 1/6) unused by
///   the upper bound itself, r = 1.
/// * `greaves_Q`: `xi = (1-theta)/3`, `z = x^xi/(log x)^2`, (U, V) =
///   (0.83, 1/6), r = r1(theta).
/// * `greaves_P`: same z, (U, V) = (3/5, 1/4), r = r2(theta).
/// * `pcc`: `z = x^(1/2)/(log x)^5`, (U, V) = (0.5111286, 1/4), r = 2.
///
/// The values are returned verbatim. At desk-scale x the log powers push z
/// below 1 (the recipes are asymptotic), so data-side runs substitute
/// `z = x^xi`; [`GreavesParams::validate`] flags the literal z.
pub fn parameter_recipe(theta: f64, mode: SieveMode, x: f64) -> Result<GreavesParams, SieveError> {
    check_theta(theta)?;
    if !(x > std::f64::consts::E) {
        return Err(SieveError::Domain("x must exceed e"));
    }
    let log_x = x.ln();
    let params = match mode {
        SieveMode::Selberg => {
            let xi = (1.0 - theta) / 6.0;
            GreavesParams {
                u: 0.83,
                v: 1.0 / 6.0,
                z: x.powf(xi) / (log_x * log_x),
                theta,
                xi,
                r: 1,
            }
        }
        SieveMode::GreavesQ => {
            let xi = (1.0 - theta) / 3.0;
            GreavesParams {
                u: 0.83,
                v: 1.0 / 6.0,
                z: x.powf(xi) / (log_x * log_x),
                theta,
                xi,
                r: r1_of(theta)?,
            }
        }
        SieveMode::GreavesP => {
            let xi = (1.0 - theta) / 3.0;
            GreavesParams {
                u: 3.0 / 5.0,
                v: 0.25,
                z: x.powf(xi) / (log_x * log_x),
                theta,
                xi,
                r: r2_of(theta)?,
            }
        }
        SieveMode::Pcc => GreavesParams {
            u: PCC_U,
            v: 0.25,
            z: x.sqrt() / log_x.powi(5),
            theta,
            xi: 0.5,
            r: 2,
        },
    };
    Ok(params)
}

/// Leading terms of the conditional bounds at scale x with constant C.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeadingTerms {
    pub upper: f64,
    #[serde(rename = "lower_Q")]
    pub lower_q: f64,
    #[serde(rename = "lower_P")]
    pub lower_p: f64,
    #[serde(rename = "lower_PCC")]
    pub lower_pcc: f64,
}

/// `upper = (3/(1-theta)) C x/(log x)^2`; the lower terms scale it by the
/// pinned J values, and the PCC term drops the amplification entirely.
pub fn leading_terms(x: f64, theta: f64, c: f64) -> Result<LeadingTerms, SieveError> {
    check_theta(theta)?;
    if !(x > std::f64::consts::E) {
        return Err(SieveError::Domain("x must exceed e"));
    }
    let base = c * x / (x.ln() * x.ln());
    let amp = 3.0 / (1.0 - theta);
    Ok(LeadingTerms {
        upper: amp * base,
        lower_q: amp * J_LOWER_Q * base,
        lower_p: amp * J_LOWER_P * base,
        lower_pcc: base,
    })
}

/// The sieve input multiset: trace values plus the level m_E fixing the
/// sieve prime set P = {l : l does not divide m_E}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SieveData {
    values: Vec<i64>,
    m_e: u64,
}

impl SieveData {
    /// Wraps raw values without filtering; for synthetic inputs. Real trace
    /// data should come through [`SieveData::from_table`].
    pub fn new(values: Vec<i64>, m_e: u64) -> Result<Self, SieveError> {
        if m_e < 2 || m_e % 2 != 0 {
            return Err(SieveError::Domain("m_E must be even and >= 2"));
        }
        Ok(SieveData { values, m_e })
    }

    /// The multiset A: traces with gcd(a_p, m_E) = 1, multiplicity by p.
    /// a_p = 0 never passes (gcd(0, m_E) = m_E).
    pub fn from_table(table: &TraceTable, m_e: u64) -> Result<Self, SieveError> {
        let mut data = SieveData::new(Vec::new(), m_e)?;
        data.values = table
            .records()
            .iter()
            .map(|r| r.a_p)
            .filter(|a| num_integer::gcd(a.unsigned_abs(), m_e) == 1)
            .collect();
        Ok(data)
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn m_e(&self) -> u64 {
        self.m_e
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    fn is_sieve_prime(&self, l: u64) -> bool {
        self.m_e % l != 0
    }
}

/// `S(A, P, z)`: members free of every sieve prime < z. The member 0 is
/// divisible by everything, so it survives only when no sieve prime is
/// below z.
pub fn sifted_count(data: &SieveData, z: f64) -> Result<u64, SieveError> {
    let limit = if z <= 2.0 { 0 } else { z.ceil() as u64 };
    let primes = primes_up_to(limit)?;
    let sieve: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&l| (l as f64) < z && data.is_sieve_prime(l))
        .collect();
    let mut count = 0u64;
    for &a in data.values() {
        let survives = if a == 0 {
            sieve.is_empty()
        } else {
            let n = a.unsigned_abs();
            sieve.iter().all(|&l| n % l != 0)
        };
        if survives {
            count += 1;
        }
    }
    Ok(count)
}

/// The ramp weight: 0 below z^V, `(log l/log z - V)/(U - V)` on
/// [z^V, z^U), and 1 from z^U on.
pub fn g_weight(ell: u64, params: &GreavesParams) -> f64 {
    debug_assert!(params.z > 1.0, "g_weight needs z > 1");
    let t = (ell as f64).ln() / params.z.ln();
    if t < params.v {
        0.0
    } else if t >= params.u {
        1.0
    } else {
        (t - params.v) / (params.u - params.v)
    }
}

/// `script_G(n) = max(0, 1 - sum_{l | n} (1 - g(l)))`.
///
/// Callers pass n = gcd(a, P(z^U)), whose prime factors all lie in the
/// sieve set; factors at or above z^U contribute nothing since g = 1 there.
/// The convention gcd(0, k) = k makes n = 0 stand for P(z^U) itself, which
/// the ramp primes push to 0.
pub fn script_g(n: u64, params: &GreavesParams) -> Result<f64, SieveError> {
    if n == 0 {
        return Ok(0.0);
    }
    let f = factorize(n)?;
    let deficit: f64 = f
        .factors()
        .iter()
        .map(|&(l, _)| 1.0 - g_weight(l, params))
        .sum();
    Ok((1.0 - deficit).max(0.0))
}

/// `H = sum_{a in A} script_G(gcd(a, P(z^U)))`, the weighted sifted sum.
pub fn weighted_h(data: &SieveData, params: &GreavesParams) -> Result<f64, SieveError> {
    if !(params.z > 1.0) {
        return Err(SieveError::Domain("weighted_h requires z > 1"));
    }
    let zu = params.z.powf(params.u);
    let primes = primes_up_to(zu.ceil() as u64)?;
    let ramp: Vec<u64> = primes
        .iter()
        .copied()
        .filter(|&l| (l as f64) < zu && data.is_sieve_prime(l))
        .collect();
    let mut h = 0.0;
    for &a in data.values() {
        let deficit: f64 = if a == 0 {
            ramp.iter().map(|&l| 1.0 - g_weight(l, params)).sum()
        } else {
            let n = a.unsigned_abs();
            ramp.iter()
                .filter(|&&l| n % l == 0)
                .map(|&l| 1.0 - g_weight(l, params))
                .sum()
        };
        h += (1.0 - deficit).max(0.0);
    }
    Ok(h)
}

/// Empirical remainder `R_d = #A_d - (w(d)/d) C1 pi(x)`, with pi(x) the
/// exact prime count. Report-only: its smallness is conditional.
pub fn empirical_rd(data: &SieveData, c1: f64, x: f64, d: u64) -> Result<f64, SieveError> {
    let w = density_w(d, data.m_e())?;
    let count = data
        .values()
        .iter()
        .filter(|&&a| a == 0 || a.unsigned_abs() % d == 0)
        .count();
    let pi_x = primes_up_to(x.floor() as u64)?.len() as f64;
    let wf = *w.numer() as f64 / *w.denom() as f64;
    Ok(count as f64 - (wf / d as f64) * c1 * pi_x)
}

/// Both sides of the lower-bound lemma on one data set.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LowerLemmaReport {
    #[serde(rename = "H")]
    pub h: f64,
    pub count_omega_le_r: u64,
    #[serde(rename = "count_Omega_le_r")]
    pub count_big_omega_le_r: u64,
    pub square_hits: u64,
    pub max_ok: bool,
    pub zeros: u64,
    pub factors_in_sieve_set: bool,
}

/// Evaluates the lower-bound lemma: with every prime factor of every member
/// in the sieve set and `max |a| <= z^(rU + V)`,
///
/// * `#{a : omega(a) <= r} >= H`, and
/// * `#{a : Omega(a) <= r} >= H - sum_(z^V <= l < z^U) #A_(l^2)`.
///
/// Zeros are filtered out first and reported. Both inequalities are
/// unconditional combinatorics, so they are hard-asserted whenever the
/// hypotheses hold.
pub fn check_lower_lemma(
    data: &SieveData,
    params: &GreavesParams,
) -> Result<LowerLemmaReport, SieveError> {
    if !(params.z > 1.0) {
        return Err(SieveError::Domain("check_lower_lemma requires z > 1"));
    }
    let zeros = data.values().iter().filter(|&&a| a == 0).count() as u64;
    let filtered = SieveData {
        values: data.values().iter().copied().filter(|&a| a != 0).collect(),
        m_e: data.m_e(),
    };

    let h = weighted_h(&filtered, params)?;

    let r = params.r.min(u32::MAX as u64) as u32;
    let mut count_omega = 0u64;
    let mut count_big_omega = 0u64;
    let mut factors_ok = true;
    for &a in filtered.values() {
        let f = factorize(a.unsigned_abs())?;
        if f.omega() <= r {
            count_omega += 1;
        }
        if f.big_omega() <= r {
            count_big_omega += 1;
        }
        if f.factors().iter().any(|&(l, _)| !filtered.is_sieve_prime(l)) {
            factors_ok = false;
        }
    }

    let zv = params.z.powf(params.v);
    let zu = params.z.powf(params.u);
    let mut square_hits = 0u64;
    for &l in primes_up_to(zu.ceil() as u64)?.iter() {
        let lf = l as f64;
        if lf >= zv && lf < zu && filtered.is_sieve_prime(l) {
            let l2 = l * l;
            square_hits += filtered
                .values()
                .iter()
                .filter(|&&a| a.unsigned_abs() % l2 == 0)
                .count() as u64;
        }
    }

    let max_abs = filtered.values().iter().map(|a| a.unsigned_abs()).max().unwrap_or(0);
    let max_ok = (max_abs as f64) <= params.z.powf(params.r as f64 * params.u + params.v);

    if max_ok && factors_ok {
        assert!(
            count_omega as f64 >= h - 1e-9,
            "lower-bound lemma violated: #(omega <= {}) = {count_omega} < H = {h}",
            params.r
        );
        assert!(
            count_big_omega as f64 >= h - square_hits as f64 - 1e-9,
            "lower-bound lemma (Omega form) violated: \
             #(Omega <= {}) = {count_big_omega} < H - {square_hits} = {}",
            params.r,
            h - square_hits as f64
        );
    }

    Ok(LowerLemmaReport {
        h,
        count_omega_le_r: count_omega,
        count_big_omega_le_r: count_big_omega,
        square_hits,
        max_ok,
        zeros,
        factors_in_sieve_set: factors_ok,
    })
}

/// Smallest r >= 1 with `z^(rU + V) >= max_abs`, the budget that turns on
/// the lemma's max hypothesis.
pub fn minimal_r(z: f64, u: f64, v: f64, max_abs: u64) -> Result<u64, SieveError> {
    if !(z > 1.0) {
        return Err(SieveError::Domain("minimal_r requires z > 1"));
    }
    if !(u > 0.0) {
        return Err(SieveError::Domain("minimal_r requires U > 0"));
    }
    if max_abs <= 1 {
        return Ok(1);
    }
    let need = ((max_abs as f64).ln() / z.ln() - v) / u;
    let mut r = if need < 1.0 { 1 } else { need.ceil() as u64 };
    while (max_abs as f64) > z.powf(r as f64 * u + v) {
        r += 1;
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frobenius::{build_trace_table, BuildMethod, CurveSpec};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn toy_params() -> GreavesParams {
        GreavesParams {
            u: 0.6,
            v: 0.25,
            z: 10.0,
            theta: 0.5,
            xi: 0.25,
            r: 3,
        }
    }

    #[test]
    fn quadrature_sanity() {
        assert!((quad::weight_sum() - 2.0).abs() < 1e-12);
        let (sin_int, err) = quad::integrate_checked(&|x: f64| x.sin(), 0.0, std::f64::consts::PI);
        assert!((sin_int - 2.0).abs() < 1e-12);
        assert!(err < 1e-12);
        let cubic = quad::integrate(&|x: f64| x * x, 0.0, 1.0, 1);
        assert!((cubic - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn alpha_beta_vanish_at_quarter() {
        assert_eq!(alpha_of(0.25).unwrap(), 0.0);
        assert_eq!(beta_of(0.25).unwrap(), 0.0);
        assert!(alpha_of(0.1).is_err());
        assert!(beta_of(0.3).is_err());
    }

    #[test]
    fn alpha_beta_quadrature_stable() {
        let gv = greaves_values(0.6, 0.2).unwrap();
        assert!(gv.quadrature_error_estimate < 1e-9);
        assert!(gv.alpha.is_finite() && gv.beta.is_finite());
        // The leading term of beta at V = 1/6 is log(5/3); the integral only
        // subtracts from it.
        let beta = beta_of(1.0 / 6.0).unwrap();
        assert!(beta < (5.0f64 / 3.0).ln());
        assert!(beta > 0.0);
    }

    #[test]
    fn j_closed_form_at_quarter() {
        for u in [0.35, PCC_U, 0.6, 0.83] {
            let closed = (u * (1.0 / u).ln() + (1.0 - u) * (1.0 / (1.0 - u)).ln()
                - (4.0f64 / 3.0).ln()
                - 0.25 * 3.0f64.ln())
                / (u - 0.25);
            assert!((j_of(u, 0.25).unwrap() - closed).abs() < 1e-12, "u = {u}");
        }
    }

    #[test]
    fn j_pinned_values() {
        assert!((j_of(0.83, 1.0 / 6.0).unwrap() - 0.00692).abs() < 5e-5);
        assert!((j_of(0.6, 0.25).unwrap() - 0.3162).abs() < 5e-4);
        assert!((j_of(PCC_U, 0.25).unwrap() - 0.5).abs() < 1e-4);
        assert!(j_of(0.25, 0.25).is_err());
    }

    #[test]
    fn j_strictly_monotone_at_quarter() {
        // Strict monotonicity justifies the bisection bracket. The pinned
        // values J(0.5111286) = 1/2 > J(0.6) = 0.3162 fix the direction:
        // J( . , 1/4) falls in U, crossing zero at U = 3/4 where the
        // entropy term returns to its U = 1/4 value.
        let mut prev = f64::INFINITY;
        for k in 0..=60 {
            let u = 0.3 + 0.01 * k as f64;
            let j = j_of(u, 0.25).unwrap();
            assert!(j < prev, "not decreasing at u = {u}");
            prev = j;
        }
        assert!(j_of(0.75, 0.25).unwrap().abs() < 1e-12);
    }

    #[test]
    fn j_small_near_complementary_parameters() {
        // Near U + V = 1 the functional is close to zero.
        for k in 0..=8 {
            let v = 1.0 / 6.0 + (0.25 - 1.0 / 6.0) * k as f64 / 8.0;
            let j = j_of(1.0 - v, v).unwrap();
            assert!(j.abs() < 0.05, "J = {j} at V = {v}");
        }
    }

    #[test]
    fn solver_examples() {
        let u = solve_u(0.25, 0.5, (0.3, 0.9)).unwrap();
        assert!((u - PCC_U).abs() < 5e-5, "u = {u}");
        let u = solve_u(0.25, 0.3162, (0.5, 0.7)).unwrap();
        assert!((u - 0.6).abs() < 1e-3);
        assert!(matches!(
            solve_u(0.25, -1.0, (0.3, 0.9)),
            Err(SieveError::Solver(_))
        ));
    }

    #[test]
    fn exponent_formulas() {
        assert_eq!(r1_of(0.5).unwrap(), 4);
        assert_eq!(r2_of(0.5).unwrap(), 5);
        assert_eq!(r1_of(2.0 / 3.0).unwrap(), 6);
        assert_eq!(r2_of(2.0 / 3.0).unwrap(), 8);
        assert!(r1_of(0.4).is_err());
        assert!(r2_of(1.0).is_err());
    }

    #[test]
    fn density_values() {
        assert_eq!(density_w(1, 2).unwrap(), Ratio::from_integer(1));
        assert_eq!(density_w(3, 2).unwrap(), Ratio::new(9, 8));
        assert_eq!(density_w(15, 2).unwrap(), Ratio::new(75, 64));
        assert!(density_w(12, 2).is_err());
        assert!(density_w(2, 2).is_err());
        assert!(density_w(0, 2).is_err());
    }

    #[test]
    fn density_multiplicative() {
        for (d1, d2) in [(3u64, 5u64), (3, 7), (5, 21), (7, 11)] {
            assert_eq!(
                density_w(d1 * d2, 2).unwrap(),
                density_w(d1, 2).unwrap() * density_w(d2, 2).unwrap()
            );
        }
    }

    #[test]
    fn recipe_values() {
        let q = parameter_recipe(0.5, SieveMode::GreavesQ, 1e6).unwrap();
        assert_eq!((q.u, q.v, q.r), (0.83, 1.0 / 6.0, 4));
        assert!((q.xi - 1.0 / 6.0).abs() < 1e-15);
        let ln_x = 1e6f64.ln();
        assert!((q.z - 1e6f64.powf(1.0 / 6.0) / (ln_x * ln_x)).abs() < 1e-12);

        let p = parameter_recipe(0.5, SieveMode::GreavesP, 1e6).unwrap();
        assert_eq!((p.u, p.v, p.r), (0.6, 0.25, 5));

        let s = parameter_recipe(0.5, SieveMode::Selberg, 1e6).unwrap();
        assert!((s.xi - 1.0 / 12.0).abs() < 1e-15);
        assert!((s.z - 1e6f64.powf(1.0 / 12.0) / (ln_x * ln_x)).abs() < 1e-12);

        let c = parameter_recipe(0.5, SieveMode::Pcc, 1e6).unwrap();
        assert_eq!((c.u, c.v, c.r), (PCC_U, 0.25, 2));
        assert!((c.z - 1e3 / ln_x.powi(5)).abs() < 1e-9);

        // The literal z sinks below 1 at desk scale; validate reports it.
        assert!(q.z < 1.0);
        assert!(q.validate().is_err());
        let usable = GreavesParams { z: 1e6f64.powf(q.xi), ..q };
        usable.validate().unwrap();
    }

    #[test]
    fn mode_parsing() {
        for mode in [
            SieveMode::Selberg,
            SieveMode::GreavesQ,
            SieveMode::GreavesP,
            SieveMode::Pcc,
        ] {
            assert_eq!(mode.to_string().parse::<SieveMode>().unwrap(), mode);
        }
        assert!("chen".parse::<SieveMode>().is_err());
    }

    #[test]
    fn leading_term_coefficients() {
        let x = 1e6f64;
        let c = 1.23;
        let base = c * x / (x.ln() * x.ln());
        let lt = leading_terms(x, 0.5, c).unwrap();
        assert!((lt.upper / base - 6.0).abs() < 1e-12);
        assert!((lt.lower_q / base - 6.0 * 0.00692).abs() < 1e-12);
        assert!((lt.lower_p / base - 6.0 * 0.3162).abs() < 1e-12);
        assert!((lt.lower_pcc / base - 1.0).abs() < 1e-12);
        assert!(leading_terms(2.0, 0.5, c).is_err());
    }

    #[test]
    fn sifted_count_examples() {
        let data = SieveData::new(vec![-3, 0, 9], 2).unwrap();
        assert_eq!(sifted_count(&data, 4.0).unwrap(), 0);
        let data = SieveData::new(vec![-5, 7], 2).unwrap();
        assert_eq!(sifted_count(&data, 4.0).unwrap(), 2);
        // P(z) is empty below the first sieve prime, so everything survives.
        let data = SieveData::new(vec![-3, 0, 9], 2).unwrap();
        assert_eq!(sifted_count(&data, 2.0).unwrap(), 3);
        assert_eq!(sifted_count(&data, 3.0).unwrap(), 3);
    }

    #[test]
    fn sifted_count_monotone_in_z() {
        let data = SieveData::new(vec![-15, -7, -3, 0, 1, 9, 25, 49, 121], 2).unwrap();
        let mut prev = data.len() as u64;
        for z in [2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 50.0] {
            let s = sifted_count(&data, z).unwrap();
            assert!(s <= prev);
            prev = s;
        }
    }

    #[test]
    fn ramp_weight_shape() {
        let params = GreavesParams {
            u: 0.6,
            v: 0.25,
            z: 100.0,
            theta: 0.5,
            xi: 0.5,
            r: 2,
        };
        // z^V = 10^0.5, z^U = 10^1.2.
        assert_eq!(g_weight(3, &params), 0.0);
        assert_eq!(g_weight(17, &params), 1.0);
        let g13 = g_weight(13, &params);
        let expect = ((13.0f64).ln() / 100.0f64.ln() - 0.25) / 0.35;
        assert!((g13 - expect).abs() < 1e-15);
        assert!(g13 > 0.0 && g13 < 1.0);
    }

    #[test]
    fn script_g_examples() {
        let params = GreavesParams {
            u: 0.6,
            v: 0.25,
            z: 100.0,
            theta: 0.5,
            xi: 0.5,
            r: 2,
        };
        assert_eq!(script_g(1, &params).unwrap(), 1.0);
        // A single ramp prime reproduces its own weight.
        assert!((script_g(13, &params).unwrap() - g_weight(13, &params)).abs() < 1e-15);
        // A factor below z^V forces the weight to zero.
        assert_eq!(script_g(3 * 13, &params).unwrap(), 0.0);
        assert_eq!(script_g(0, &params).unwrap(), 0.0);
        // Factors at or above z^U are invisible.
        assert_eq!(script_g(17, &params).unwrap(), 1.0);
    }

    #[test]
    fn weighted_h_toy() {
        let data = SieveData::new(vec![-3, 7, 35], 2).unwrap();
        let params = toy_params();
        // Ramp primes in [10^0.25, 10^0.6) excluding 2: only 3.
        let g3 = ((3.0f64).ln() / 10.0f64.ln() - 0.25) / 0.35;
        let h = weighted_h(&data, &params).unwrap();
        assert!((h - (2.0 + g3)).abs() < 1e-12);
    }

    #[test]
    fn lower_lemma_toy() {
        let data = SieveData::new(vec![-3, 7, 35], 2).unwrap();
        let report = check_lower_lemma(&data, &toy_params()).unwrap();
        assert!(report.max_ok, "35 <= 10^(3*0.6+0.25)");
        assert!(report.factors_in_sieve_set);
        assert_eq!(report.zeros, 0);
        assert_eq!(report.count_omega_le_r, 3);
        assert_eq!(report.count_big_omega_le_r, 3);
        assert_eq!(report.square_hits, 0);
        assert!(report.h <= 3.0);

        // r = 2 leaves max|a| above z^(rU+V); no assertion, reported as such.
        let tight = GreavesParams { r: 2, ..toy_params() };
        let report = check_lower_lemma(&data, &tight).unwrap();
        assert!(!report.max_ok);

        let empty = SieveData::new(vec![], 2).unwrap();
        let report = check_lower_lemma(&empty, &toy_params()).unwrap();
        assert_eq!(report.h, 0.0);
        assert!(report.max_ok);
    }

    #[test]
    fn minimal_r_examples() {
        // z = 10^(1/6) style desk-scale setup: r grows with max|a|.
        let z = 1e4f64.powf(1.0 / 6.0);
        let r = minimal_r(z, 0.83, 1.0 / 6.0, 199).unwrap();
        assert_eq!(r, 4);
        assert!(z.powf(r as f64 * 0.83 + 1.0 / 6.0) >= 199.0);
        assert_eq!(minimal_r(10.0, 0.6, 0.25, 1).unwrap(), 1);
        assert_eq!(minimal_r(10.0, 0.6, 0.25, 35).unwrap(), 3);
        assert!(minimal_r(0.5, 0.6, 0.25, 10).is_err());
    }

    #[test]
    fn empirical_rd_toy() {
        // Toy table traces {0, -3, 3}; the gcd filter keeps {-3, 3}.
        let data = SieveData::new(vec![-3, 3], 2).unwrap();
        let c1 = 1.0 / 3.0;
        // pi(10) = 4.
        let r1 = empirical_rd(&data, c1, 10.0, 1).unwrap();
        assert!((r1 - (2.0 - c1 * 4.0)).abs() < 1e-12);
        let r3 = empirical_rd(&data, c1, 10.0, 3).unwrap();
        assert!((r3 - (2.0 - (9.0 / 8.0) / 3.0 * c1 * 4.0)).abs() < 1e-12);
        assert!(empirical_rd(&data, c1, 10.0, 2).is_err());
    }

    #[test]
    fn lower_lemma_on_trace_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x51e7_e001);
        let x = 10_000u64;
        let mut checked = 0;
        while checked < 2 {
            let a = rng.gen_range(-50..=50);
            let b = rng.gen_range(-50..=50);
            let Ok(curve) = CurveSpec::new(a, b) else { continue };
            let table = build_trace_table(&curve, x, BuildMethod::Auto, 4).unwrap();
            let data = SieveData::from_table(&table, 2).unwrap();
            let recipe = parameter_recipe(0.5, SieveMode::GreavesQ, x as f64).unwrap();
            let z = (x as f64).powf(recipe.xi);
            let max_abs = data.values().iter().map(|a| a.unsigned_abs()).max().unwrap_or(0);
            let r = minimal_r(z, recipe.u, recipe.v, max_abs).unwrap();
            let params = GreavesParams { z, r, ..recipe };
            params.validate().unwrap();
            // check_lower_lemma hard-asserts both inequalities internally.
            let report = check_lower_lemma(&data, &params).unwrap();
            assert!(report.max_ok);
            assert!(report.factors_in_sieve_set);
            assert!(report.h <= data.len() as f64);
            checked += 1;
        }
    }

    proptest! {
        #[test]
        fn script_g_stays_in_unit_interval(n in 1u64..1_000_000) {
            let params = GreavesParams {
                u: 0.6, v: 0.25, z: 100.0, theta: 0.5, xi: 0.5, r: 2,
            };
            let g = script_g(n, &params).unwrap();
            prop_assert!((0.0..=1.0).contains(&g));
        }

        #[test]
        fn weighted_h_bounded_by_size(values in prop::collection::vec(-500i64..500, 0..60)) {
            let data = SieveData::new(values, 2).unwrap();
            let h = weighted_h(&data, &toy_params()).unwrap();
            prop_assert!(h >= 0.0);
            prop_assert!(h <= data.len() as f64 + 1e-9);
        }

        #[test]
        fn sifted_never_exceeds_size(values in prop::collection::vec(-500i64..500, 0..60), z in 2.0f64..50.0) {
            let data = SieveData::new(values, 2).unwrap();
            let s = sifted_count(&data, z).unwrap();
            prop_assert!(s as usize <= data.len());
            prop_assert!(s <= sifted_count(&data, 2.0).unwrap());
        }
    }
}

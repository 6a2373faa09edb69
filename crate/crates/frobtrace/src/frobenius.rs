//! Frobenius traces `a_p` of short Weierstrass curves over prime fields.
//!
//! For a curve `E: y^2 = x^3 + Ax + B` and a good prime `p`, the trace is
//! `a_p = p + 1 - #E(F_p)` and satisfies the Weil bound `a_p^2 < 4p`. Two
//! engines compute it:
//!
//! - [`trace_naive`]: the character sum `a_p = -sum_t chi(t^3 + At + B)` with
//!   a batch quadratic-residue table, `O(p)` work;
//! - [`trace_fast`]: baby-step/giant-step order finding on random points
//!   inside the Hasse interval, disambiguated through the quadratic twist,
//!   falling back to the naive engine if ambiguity survives. Never errors on
//!   a valid input, and always agrees with [`trace_naive`].
//!
//! [`build_trace_table`] sweeps all good primes up to `x` across worker
//! threads; the partition is by estimated cost and the merge is ordered, so
//! the output is independent of the worker count.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::arith::{mul_mod, pow_mod, primes_up_to, ArithError};

#[derive(Debug, Error)]
pub enum FrobeniusError {
    #[error("singular curve: 4A^3 + 27B^2 = 0")]
    SingularCurve,
    #[error("p = {0} is not a good prime for this curve")]
    BadPrime(u64),
    #[error("workers must be >= 1")]
    NoWorkers,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("line {line}: {msg}")]
    Format { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn format_err(line: usize, msg: impl Into<String>) -> FrobeniusError {
    FrobeniusError::Format { line, msg: msg.into() }
}

/// A short Weierstrass curve `y^2 = x^3 + Ax + B` over `Q` with integer
/// coefficients and nonzero discriminant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CurveSpec {
    a: i64,
    b: i64,
}

impl CurveSpec {
    pub fn new(a: i64, b: i64) -> Result<Self, FrobeniusError> {
        let curve = CurveSpec { a, b };
        if curve.disc_short() == 0 {
            return Err(FrobeniusError::SingularCurve);
        }
        Ok(curve)
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    /// `4A^3 + 27B^2`; nonzero iff the curve is nonsingular.
    pub fn disc_short(&self) -> i128 {
        4 * (self.a as i128).pow(3) + 27 * (self.b as i128).pow(2)
    }

    /// Good primes are odd and do not divide the short discriminant. This
    /// approximates "p of good reduction" up to finitely many primes of the
    /// minimal model; every census shifts by O(1) at most.
    pub fn is_good_prime(&self, p: u64) -> bool {
        p > 2 && self.disc_short().rem_euclid(p as i128) != 0
    }
}

impl fmt::Display for CurveSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "y^2 = x^3 + {}x + {}", self.a, self.b)
    }
}

/// Which engine produced a record. Tables loaded from a CSV cache carry no
/// tag; the tag is diagnostic provenance, not data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMethod {
    Naive,
    Fast,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceRecord {
    pub p: u64,
    pub a_p: i64,
    pub method: Option<TraceMethod>,
}

/// The multiset `{(p, a_p)}` over good primes `p <= x`, ascending in `p`.
#[derive(Debug, Clone)]
pub struct TraceTable {
    curve: CurveSpec,
    x: u64,
    records: Vec<TraceRecord>,
}

impl TraceTable {
    pub fn curve(&self) -> &CurveSpec {
        &self.curve
    }

    pub fn x(&self) -> u64 {
        self.x
    }

    pub fn records(&self) -> &[TraceRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

impl PartialEq for TraceTable {
    // Equality is over (curve, x, (p, a_p) pairs). Method tags are excluded:
    // the CSV cache does not carry them, and `load(save(t)) == t` must hold.
    fn eq(&self, other: &Self) -> bool {
        self.curve == other.curve
            && self.x == other.x
            && self.records.len() == other.records.len()
            && self
                .records
                .iter()
                .zip(&other.records)
                .all(|(r, s)| r.p == s.p && r.a_p == s.a_p)
    }
}

impl Eq for TraceTable {}

/// All good primes of `curve` up to `x`, ascending.
pub fn good_primes(curve: &CurveSpec, x: u64) -> Result<Vec<u64>, FrobeniusError> {
    let primes = primes_up_to(x)?;
    Ok(primes
        .iter()
        .copied()
        .filter(|&p| curve.is_good_prime(p))
        .collect())
}

/// `a_p` by the full character sum, `O(p)` work.
///
/// The quadratic-residue values are batched into one table of squares mod `p`
/// so the inner loop does no modular exponentiation.
pub fn trace_naive(curve: &CurveSpec, p: u64) -> Result<i64, FrobeniusError> {
    if !curve.is_good_prime(p) {
        return Err(FrobeniusError::BadPrime(p));
    }
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for t in 1..=(p - 1) / 2 {
        chi[mul_mod(t, t, p) as usize] = 1;
    }
    let a = curve.a.rem_euclid(p as i64) as u64;
    let b = curve.b.rem_euclid(p as i64) as u64;
    let mut sum: i64 = 0;
    for t in 0..p {
        let t2 = mul_mod(t, t, p);
        let cubic = (mul_mod(t2, t, p) + mul_mod(a, t, p)) % p;
        let v = (cubic + b) % p;
        sum += chi[v as usize] as i64;
    }
    Ok(-sum)
}

/// Prime-field helpers; `p` is an odd prime below `2^32`.
struct Fp {
    p: u64,
}

impl Fp {
    fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.p)
    }

    fn pow(&self, b: u64, e: u64) -> u64 {
        pow_mod(b, e, self.p)
    }

    fn inv(&self, a: u64) -> u64 {
        debug_assert!(a != 0);
        self.pow(a, self.p - 2)
    }

    fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    fn is_square(&self, a: u64) -> bool {
        a == 0 || self.pow(a, (self.p - 1) / 2) == 1
    }

    /// Deterministic Tonelli-Shanks; `None` iff `a` is a non-residue.
    fn sqrt(&self, a: u64) -> Option<u64> {
        let p = self.p;
        if a == 0 {
            return Some(0);
        }
        if self.pow(a, (p - 1) / 2) != 1 {
            return None;
        }
        if p % 4 == 3 {
            return Some(self.pow(a, (p + 1) / 4));
        }
        let mut q = p - 1;
        let mut s = 0u32;
        while q % 2 == 0 {
            q /= 2;
            s += 1;
        }
        let mut z = 2u64;
        while self.pow(z, (p - 1) / 2) != p - 1 {
            z += 1;
        }
        let mut m = s;
        let mut c = self.pow(z, q);
        let mut t = self.pow(a, q);
        let mut r = self.pow(a, (q + 1) / 2);
        while t != 1 {
            let mut i = 0u32;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(t2, t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(m - i - 1) {
                b = self.mul(b, b);
            }
            m = i;
            c = self.mul(b, b);
            t = self.mul(t, c);
            r = self.mul(r, b);
        }
        Some(r)
    }
}

/// Affine point; `None` is the point at infinity.
type Point = Option<(u64, u64)>;

fn ec_neg(fp: &Fp, pt: Point) -> Point {
    pt.map(|(x, y)| (x, fp.neg(y)))
}

fn ec_add(fp: &Fp, a: u64, p1: Point, p2: Point) -> Point {
    let (x1, y1) = match p1 {
        None => return p2,
        Some(v) => v,
    };
    let (x2, y2) = match p2 {
        None => return p1,
        Some(v) => v,
    };
    let lambda = if x1 == x2 {
        // Opposite points (including a 2-torsion point doubled) give infinity.
        if fp.add(y1, y2) == 0 {
            return None;
        }
        let num = fp.add(fp.mul(3 % fp.p, fp.mul(x1, x1)), a);
        fp.mul(num, fp.inv(fp.mul(2 % fp.p, y1)))
    } else {
        fp.mul(fp.sub(y2, y1), fp.inv(fp.sub(x2, x1)))
    };
    let x3 = fp.sub(fp.sub(fp.mul(lambda, lambda), x1), x2);
    let y3 = fp.sub(fp.mul(lambda, fp.sub(x1, x3)), y1);
    Some((x3, y3))
}

fn ec_mul(fp: &Fp, a: u64, mut k: u64, pt: Point) -> Point {
    let mut acc: Point = None;
    let mut base = pt;
    while k > 0 {
        if k & 1 == 1 {
            acc = ec_add(fp, a, acc, base);
        }
        base = ec_add(fp, a, base, base);
        k >>= 1;
    }
    acc
}

/// Points tried per curve before switching to the twist (and per twist).
const FAST_POINT_BUDGET: usize = 8;
/// Random x draws allowed per point pick.
const X_DRAW_BUDGET: usize = 100;

fn seed_for(curve: &CurveSpec, p: u64) -> u64 {
    let mut h = 0x9e37_79b9_7f4a_7c15u64;
    for v in [curve.a as u64, curve.b as u64, p] {
        h ^= v.wrapping_mul(0xff51_afd7_ed55_8ccd).rotate_left(31);
        h = h
            .wrapping_mul(0xc4ce_b9fe_1a85_ec53)
            .wrapping_add(0x1656_67b1_9e37_79f9);
    }
    h
}

fn random_point(fp: &Fp, a: u64, b: u64, rng: &mut ChaCha8Rng) -> Option<(u64, u64)> {
    for _ in 0..X_DRAW_BUDGET {
        let x = rng.gen_range(0..fp.p);
        let rhs = fp.add(fp.mul(fp.mul(x, x), x), fp.add(fp.mul(a, x), b));
        if let Some(y) = fp.sqrt(rhs) {
            // Canonical branch keeps the walk independent of sqrt internals.
            return Some((x, y.min(fp.neg(y))));
        }
    }
    None
}

/// Marks every `j` in `[0, 2s]` with `(p + 1 - s + j) * P = O`.
///
/// The group order divides at least one such `N`, so the returned mask always
/// contains the true candidate. Collecting every match (not just the first)
/// is what makes intersecting masks across points sound.
fn order_multiples(fp: &Fp, a: u64, s: u64, pt: (u64, u64)) -> Vec<bool> {
    let p = fp.p;
    let width = (2 * s + 1) as usize;
    let lo = p + 1 - s;
    let m = ((width as f64).sqrt().ceil() as u64).max(1);

    // Baby steps i*P for 0 <= i < m; a return to O reveals the exact order.
    let mut baby: HashMap<(u64, u64), Vec<u64>> = HashMap::with_capacity(m as usize);
    let mut cur: Point = None;
    let mut order: Option<u64> = None;
    for i in 0..m {
        match cur {
            None if i > 0 => {
                order = Some(i);
                break;
            }
            None => {}
            Some(q) => baby.entry(q).or_default().push(i),
        }
        cur = ec_add(fp, a, cur, Some(pt));
    }

    let mut out = vec![false; width];
    if let Some(ord) = order {
        let mut n = lo.next_multiple_of(ord);
        while n <= lo + 2 * s {
            out[(n - lo) as usize] = true;
            n += ord;
        }
        return out;
    }

    // Giant steps: j*P = -Q with Q = lo*P; decompose j = k*m + i.
    let q = ec_mul(fp, a, lo, Some(pt));
    let big = ec_mul(fp, a, m, Some(pt));
    let neg_big = ec_neg(fp, big);
    let mut t = ec_neg(fp, q);
    let kmax = (width as u64 - 1) / m + 1;
    for k in 0..=kmax {
        match t {
            None => {
                let j = k * m;
                if j < width as u64 {
                    out[j as usize] = true;
                }
            }
            Some(target) => {
                if let Some(is) = baby.get(&target) {
                    for &i in is {
                        let j = k * m + i;
                        if j < width as u64 {
                            out[j as usize] = true;
                        }
                    }
                }
            }
        }
        t = ec_add(fp, a, t, neg_big);
    }
    out
}

/// Intersects order constraints from random points into `mask`; returns true
/// once exactly one candidate survives.
fn refine_candidates(
    fp: &Fp,
    a: u64,
    b: u64,
    s: u64,
    mask: &mut [bool],
    rng: &mut ChaCha8Rng,
) -> bool {
    for _ in 0..FAST_POINT_BUDGET {
        let pt = match random_point(fp, a, b, rng) {
            Some(pt) => pt,
            None => break,
        };
        let hits = order_multiples(fp, a, s, pt);
        for (m, h) in mask.iter_mut().zip(&hits) {
            *m &= *h;
        }
        let live = mask.iter().filter(|&&m| m).count();
        if live <= 1 {
            return live == 1;
        }
    }
    false
}

/// `a_p` by order finding inside the Hasse interval.
///
/// Every candidate order kept by a random point is a genuine multiple
/// constraint, so the intersection always contains `#E(F_p)`; if several
/// candidates survive the point budget, the quadratic twist's constraint
/// `#E + #E' = 2p + 2` is intersected in, and any remaining ambiguity falls
/// back to [`trace_naive`]. Valid input therefore never errors.
pub fn trace_fast(curve: &CurveSpec, p: u64) -> Result<i64, FrobeniusError> {
    if !curve.is_good_prime(p) {
        return Err(FrobeniusError::BadPrime(p));
    }
    let fp = Fp { p };
    let a = curve.a.rem_euclid(p as i64) as u64;
    let b = curve.b.rem_euclid(p as i64) as u64;
    // a_p^2 < 4p strictly, so |a_p| <= s with s = isqrt(4p - 1).
    let s = (4 * p - 1).isqrt();
    let width = (2 * s + 1) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed_for(curve, p));

    let mut mask = vec![true; width];
    if !refine_candidates(&fp, a, b, s, &mut mask, &mut rng) {
        // Twist orders N' pair with N by N + N' = 2p + 2, i.e. j' = 2s - j.
        let mut g = 2u64;
        while fp.is_square(g) {
            g += 1;
        }
        let g2 = fp.mul(g, g);
        let at = fp.mul(a, g2);
        let bt = fp.mul(b, fp.mul(g2, g));
        let mut twist_mask = vec![true; width];
        refine_candidates(&fp, at, bt, s, &mut twist_mask, &mut rng);
        for j in 0..width {
            if mask[j] && !twist_mask[width - 1 - j] {
                mask[j] = false;
            }
        }
    }

    let live: Vec<usize> = (0..width).filter(|&j| mask[j]).collect();
    if live.len() == 1 {
        // N = p + 1 - s + j, so a_p = p + 1 - N = s - j.
        return Ok(s as i64 - live[0] as i64);
    }
    trace_naive(curve, p)
}

/// Engine selection for a table sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BuildMethod {
    Naive,
    Fast,
    /// Naive below [`AUTO_CROSSOVER`], fast above.
    Auto,
}

/// Below this prime the character sum beats the BSGS setup cost.
pub const AUTO_CROSSOVER: u64 = 1 << 14;

/// Contiguous index ranges with approximately equal `sum p` per worker.
fn partition_by_cost(primes: &[u64], workers: usize) -> Vec<std::ops::Range<usize>> {
    let n = primes.len();
    let w = workers.min(n).max(1);
    let total: u128 = primes.iter().map(|&p| p as u128).sum();
    let mut ranges = Vec::with_capacity(w);
    let mut start = 0usize;
    let mut acc: u128 = 0;
    let mut idx = 0usize;
    for k in 1..w {
        let target = total * k as u128 / w as u128;
        while idx < n && acc < target {
            acc += primes[idx] as u128;
            idx += 1;
        }
        ranges.push(start..idx);
        start = idx;
    }
    ranges.push(start..n);
    ranges
}

/// One record per good prime `p <= x`. Output is independent of `workers`:
/// the partition is deterministic and chunks are merged in range order.
pub fn build_trace_table(
    curve: &CurveSpec,
    x: u64,
    method: BuildMethod,
    workers: usize,
) -> Result<TraceTable, FrobeniusError> {
    if workers == 0 {
        return Err(FrobeniusError::NoWorkers);
    }
    let primes = good_primes(curve, x)?;
    let compute = |ps: &[u64]| -> Result<Vec<TraceRecord>, FrobeniusError> {
        ps.iter()
            .map(|&p| {
                let use_fast = match method {
                    BuildMethod::Naive => false,
                    BuildMethod::Fast => true,
                    BuildMethod::Auto => p >= AUTO_CROSSOVER,
                };
                let (a_p, tag) = if use_fast {
                    (trace_fast(curve, p)?, TraceMethod::Fast)
                } else {
                    (trace_naive(curve, p)?, TraceMethod::Naive)
                };
                debug_assert!((a_p as i128) * (a_p as i128) < 4 * p as i128);
                Ok(TraceRecord {
                    p,
                    a_p,
                    method: Some(tag),
                })
            })
            .collect()
    };

    let ranges = partition_by_cost(&primes, workers);
    let records = if ranges.len() <= 1 {
        compute(&primes)?
    } else {
        let chunks = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|r| {
                    let slice = &primes[r.clone()];
                    scope.spawn(move || compute(slice))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("trace worker panicked"))
                .collect::<Result<Vec<_>, FrobeniusError>>()
        })?;
        chunks.into_iter().flatten().collect()
    };

    Ok(TraceTable {
        curve: *curve,
        x,
        records,
    })
}

/// Writes the trace-cache CSV: a `# frobtrace v1` header, then `p,a_p` rows
/// ascending in `p`, LF line endings, no trailing separator.
pub fn save_trace_table<P: AsRef<Path>>(table: &TraceTable, path: P) -> Result<(), FrobeniusError> {
    fs::write(path, render_trace_table(table))?;
    Ok(())
}

pub fn render_trace_table(table: &TraceTable) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(
        out,
        "# frobtrace v1 A={} B={} x={}",
        table.curve.a, table.curve.b, table.x
    )
    .unwrap();
    for r in &table.records {
        writeln!(out, "{},{}", r.p, r.a_p).unwrap();
    }
    out
}

pub fn load_trace_table<P: AsRef<Path>>(path: P) -> Result<TraceTable, FrobeniusError> {
    parse_trace_table(&fs::read_to_string(path)?)
}

/// Parses the trace-cache CSV; every rejection names the offending line.
pub fn parse_trace_table(text: &str) -> Result<TraceTable, FrobeniusError> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| format_err(1, "empty file; expected `# frobtrace v1` header"))?;
    let rest = header
        .strip_prefix("# frobtrace v1 ")
        .ok_or_else(|| format_err(1, "malformed header; expected `# frobtrace v1 A=<int> B=<int> x=<int>`"))?;
    let mut fields = rest.split(' ');
    let mut field = |key: &str| -> Result<i64, FrobeniusError> {
        let tok = fields
            .next()
            .ok_or_else(|| format_err(1, format!("missing `{key}=` in header")))?;
        let val = tok
            .strip_prefix(key)
            .and_then(|t| t.strip_prefix('='))
            .ok_or_else(|| format_err(1, format!("expected `{key}=<int>`, found `{tok}`")))?;
        val.parse::<i64>()
            .map_err(|_| format_err(1, format!("invalid integer in `{tok}`")))
    };
    let a = field("A")?;
    let b = field("B")?;
    let x = field("x")?;
    if x < 0 {
        return Err(format_err(1, "x must be nonnegative"));
    }
    let x = x as u64;
    let curve =
        CurveSpec::new(a, b).map_err(|_| format_err(1, "singular curve in header"))?;

    let mut records = Vec::new();
    let mut last_p = 0u64;
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        if line.is_empty() {
            return Err(format_err(lineno, "blank line"));
        }
        let (ps, aps) = line
            .split_once(',')
            .ok_or_else(|| format_err(lineno, "expected `p,a_p`"))?;
        let p: u64 = ps
            .parse()
            .map_err(|_| format_err(lineno, format!("invalid prime `{ps}`")))?;
        let a_p: i64 = aps
            .parse()
            .map_err(|_| format_err(lineno, format!("invalid trace `{aps}`")))?;
        if p <= last_p {
            return Err(format_err(lineno, "primes not strictly increasing"));
        }
        if p > x {
            return Err(format_err(lineno, format!("prime {p} exceeds x = {x}")));
        }
        if !curve.is_good_prime(p) {
            return Err(format_err(lineno, format!("{p} is not a good prime")));
        }
        if (a_p as i128) * (a_p as i128) >= 4 * p as i128 {
            return Err(format_err(
                lineno,
                format!("Weil bound violated: {a_p}^2 >= 4*{p}"),
            ));
        }
        last_p = p;
        records.push(TraceRecord {
            p,
            a_p,
            method: None,
        });
    }
    Ok(TraceTable { curve, x, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    /// Independent oracle: count affine solutions of y^2 = x^3 + Ax + B by
    /// exhaustive enumeration, then a_p = p + 1 - (#affine + 1).
    fn trace_by_enumeration(curve: &CurveSpec, p: u64) -> i64 {
        let a = curve.a.rem_euclid(p as i64) as u64;
        let b = curve.b.rem_euclid(p as i64) as u64;
        let mut affine = 0i64;
        for x in 0..p {
            let rhs = (mul_mod(mul_mod(x, x, p), x, p) + mul_mod(a, x, p) + b) % p;
            for y in 0..p {
                if mul_mod(y, y, p) == rhs {
                    affine += 1;
                }
            }
        }
        p as i64 + 1 - (affine + 1)
    }

    fn seeded_curves(n: usize) -> Vec<CurveSpec> {
        let mut rng = ChaCha8Rng::seed_from_u64(0xcafe_0001);
        let mut out = Vec::new();
        while out.len() < n {
            let a = rng.gen_range(-50..=50i64);
            let b = rng.gen_range(-50..=50i64);
            if let Ok(c) = CurveSpec::new(a, b) {
                out.push(c);
            }
        }
        out
    }

    #[test]
    fn curve_rejects_singular() {
        assert!(CurveSpec::new(0, 0).is_err());
        assert!(CurveSpec::new(-3, 2).is_err());
        assert!(CurveSpec::new(1, 1).is_ok());
    }

    #[test]
    fn good_primes_examples() {
        let c = CurveSpec::new(1, 1).unwrap();
        assert_eq!(good_primes(&c, 10).unwrap(), vec![3, 5, 7]);
        assert_eq!(good_primes(&c, 2).unwrap(), Vec::<u64>::new());
        let cm = CurveSpec::new(-1, 0).unwrap();
        assert_eq!(good_primes(&cm, 10).unwrap(), vec![3, 5, 7]);
        // disc_short(1,1) = 31, so 31 is bad once x reaches it.
        assert!(!good_primes(&c, 40).unwrap().contains(&31));
    }

    #[test]
    fn trace_naive_examples() {
        let cm = CurveSpec::new(-1, 0).unwrap();
        assert_eq!(trace_naive(&cm, 5).unwrap(), -2);
        assert_eq!(trace_naive(&cm, 7).unwrap(), 0);
        let c = CurveSpec::new(1, 1).unwrap();
        assert_eq!(trace_naive(&c, 5).unwrap(), -3);
        assert_eq!(trace_naive(&c, 7).unwrap(), 3);
        assert!(trace_naive(&c, 2).is_err());
        assert!(trace_naive(&c, 31).is_err());
    }

    #[test]
    fn trace_naive_matches_enumeration() {
        for curve in seeded_curves(4) {
            for p in good_primes(&curve, 60).unwrap() {
                assert_eq!(
                    trace_naive(&curve, p).unwrap(),
                    trace_by_enumeration(&curve, p),
                    "{curve} at p={p}"
                );
            }
        }
    }

    #[test]
    fn trace_fast_examples() {
        let c = CurveSpec::new(1, 1).unwrap();
        assert_eq!(trace_fast(&c, 5).unwrap(), -3);
        let c23 = CurveSpec::new(2, 3).unwrap();
        assert_eq!(trace_fast(&c23, 97).unwrap(), trace_naive(&c23, 97).unwrap());
        let cm = CurveSpec::new(-1, 0).unwrap();
        assert_eq!(
            trace_fast(&cm, 10_009).unwrap(),
            trace_naive(&cm, 10_009).unwrap()
        );
    }

    #[test]
    fn trace_fast_matches_naive_sampled() {
        for curve in seeded_curves(5) {
            for p in good_primes(&curve, 2_000).unwrap() {
                assert_eq!(
                    trace_fast(&curve, p).unwrap(),
                    trace_naive(&curve, p).unwrap(),
                    "{curve} at p={p}"
                );
            }
        }
    }

    #[test]
    fn build_toy_tables() {
        let c = CurveSpec::new(1, 1).unwrap();
        let t = build_trace_table(&c, 10, BuildMethod::Auto, 1).unwrap();
        let pairs: Vec<(u64, i64)> = t.records().iter().map(|r| (r.p, r.a_p)).collect();
        assert_eq!(pairs, vec![(3, 0), (5, -3), (7, 3)]);

        let empty = build_trace_table(&c, 2, BuildMethod::Auto, 1).unwrap();
        assert!(empty.is_empty());

        let cm = CurveSpec::new(-1, 0).unwrap();
        let tm = build_trace_table(&cm, 10, BuildMethod::Auto, 1).unwrap();
        let pairs: Vec<(u64, i64)> = tm.records().iter().map(|r| (r.p, r.a_p)).collect();
        assert_eq!(pairs, vec![(3, 0), (5, -2), (7, 0)]);
    }

    #[test]
    fn build_deterministic_across_workers() {
        let c = CurveSpec::new(2, 3).unwrap();
        let t1 = build_trace_table(&c, 20_000, BuildMethod::Auto, 1).unwrap();
        let t4 = build_trace_table(&c, 20_000, BuildMethod::Auto, 4).unwrap();
        assert_eq!(t1, t4);
        assert!(build_trace_table(&c, 10, BuildMethod::Auto, 0).is_err());
    }

    #[test]
    fn weil_bound_on_built_tables() {
        for curve in seeded_curves(3) {
            let t = build_trace_table(&curve, 3_000, BuildMethod::Auto, 2).unwrap();
            for r in t.records() {
                assert!((r.a_p as i128) * (r.a_p as i128) < 4 * r.p as i128);
            }
        }
    }

    #[test]
    fn supersingular_curve_has_zero_traces() {
        // y^2 = x^3 - x has CM by Z[i]; a_p = 0 at every good p = 3 mod 4.
        let cm = CurveSpec::new(-1, 0).unwrap();
        let t = build_trace_table(&cm, 1_000, BuildMethod::Auto, 1).unwrap();
        for r in t.records() {
            if r.p % 4 == 3 {
                assert_eq!(r.a_p, 0, "p = {}", r.p);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let c = CurveSpec::new(1, 1).unwrap();
        let t = build_trace_table(&c, 10, BuildMethod::Auto, 1).unwrap();
        save_trace_table(&t, &path).unwrap();
        let loaded = load_trace_table(&path).unwrap();
        assert_eq!(t, loaded);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "# frobtrace v1 A=1 B=1 x=10\n3,0\n5,-3\n7,3\n");
    }

    #[test]
    fn csv_rejects_bad_input() {
        let weil = "# frobtrace v1 A=1 B=1 x=10\n3,0\n5,11\n";
        match parse_trace_table(weil) {
            Err(FrobeniusError::Format { line, msg }) => {
                assert_eq!(line, 3);
                assert!(msg.contains("Weil"), "{msg}");
            }
            other => panic!("expected format error, got {other:?}"),
        }

        let shuffled = "# frobtrace v1 A=1 B=1 x=10\n5,-3\n3,0\n";
        match parse_trace_table(shuffled) {
            Err(FrobeniusError::Format { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected format error, got {other:?}"),
        }

        assert!(parse_trace_table("# wrong header\n").is_err());
        assert!(parse_trace_table("# frobtrace v1 A=0 B=0 x=10\n").is_err());
    }
}

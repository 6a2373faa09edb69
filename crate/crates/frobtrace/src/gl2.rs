//! Trace classes in `GL2(Z/mZ)` and `PGL2(Z/mZ)`, subgroup closures, and the
//! constants attached to a Galois image.
//!
//! Brute-force enumeration is the ground truth for small levels; the closed
//! forms are the fast path and every closed form is cross-checked against
//! enumeration in the test suite. A Galois image is always an input (an
//! element list or a generator set closed by [`closure`]); it is never
//! computed from a curve.

use std::collections::{HashSet, VecDeque};

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{euler_phi, factorize, primes_up_to, ArithError};

/// Largest level accepted by exhaustive `m^4` enumeration.
pub const MAX_ENUM_LEVEL: u64 = 60;

/// Default Euler-product cutoff; tail below `5 * 10^-11`.
pub const DEFAULT_EULER_CUTOFF: u64 = 100_000;

/// `e^(-gamma)`, the Mertens constant governing `W(z) log z`.
pub const EXP_NEG_GAMMA: f64 = 0.561_459_483_566_885_1;

#[derive(Debug, Error)]
pub enum Gl2Error {
    #[error("{0}")]
    Domain(&'static str),
    #[error("level {0} exceeds the enumeration limit ({MAX_ENUM_LEVEL})")]
    Capacity(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A 2x2 matrix over `Z/mZ`, entries reduced into `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueMatrix {
    m: u64,
    e: [u64; 4],
}

impl ResidueMatrix {
    pub fn new(m: u64, a: i64, b: i64, c: i64, d: i64) -> Result<Self, Gl2Error> {
        if m < 2 {
            return Err(Gl2Error::Domain("matrix level must be >= 2"));
        }
        let r = |v: i64| v.rem_euclid(m as i64) as u64;
        Ok(ResidueMatrix {
            m,
            e: [r(a), r(b), r(c), r(d)],
        })
    }

    fn from_raw(m: u64, e: [u64; 4]) -> Self {
        debug_assert!(e.iter().all(|&v| v < m));
        ResidueMatrix { m, e }
    }

    pub fn identity(m: u64) -> Result<Self, Gl2Error> {
        Self::new(m, 1, 0, 0, 1)
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn tr(&self) -> u64 {
        (self.e[0] + self.e[3]) % self.m
    }

    pub fn det(&self) -> u64 {
        let [a, b, c, d] = self.e;
        let ad = a as u128 * d as u128 % self.m as u128;
        let bc = b as u128 * c as u128 % self.m as u128;
        ((ad + self.m as u128 - bc) % self.m as u128) as u64
    }

    pub fn is_invertible(&self) -> bool {
        self.det().gcd(&self.m) == 1
    }

    pub fn mul(&self, other: &ResidueMatrix) -> ResidueMatrix {
        assert_eq!(self.m, other.m, "level mismatch");
        let m = self.m as u128;
        let [a, b, c, d] = self.e.map(|v| v as u128);
        let [e, f, g, h] = other.e.map(|v| v as u128);
        ResidueMatrix::from_raw(
            self.m,
            [
                ((a * e + b * g) % m) as u64,
                ((a * f + b * h) % m) as u64,
                ((c * e + d * g) % m) as u64,
                ((c * f + d * h) % m) as u64,
            ],
        )
    }
}

/// An explicit subgroup of `GL2(Z/mZ)`, standing in for the Galois image at
/// the torsion conductor. Elements are sorted, so equal images compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaloisImage {
    m: u64,
    elements: Vec<ResidueMatrix>,
}

impl GaloisImage {
    /// The whole of `GL2(Z/mZ)` by exhaustive enumeration.
    pub fn full(m: u64) -> Result<Self, Gl2Error> {
        if m < 2 {
            return Err(Gl2Error::Domain("image level must be >= 2"));
        }
        if m > MAX_ENUM_LEVEL {
            return Err(Gl2Error::Capacity(m));
        }
        let mut elements = Vec::new();
        for a in 0..m {
            for b in 0..m {
                for c in 0..m {
                    for d in 0..m {
                        let mat = ResidueMatrix::from_raw(m, [a, b, c, d]);
                        if mat.is_invertible() {
                            elements.push(mat);
                        }
                    }
                }
            }
        }
        Ok(GaloisImage { m, elements })
    }

    /// Wraps an explicit element list; rejects level mismatches and
    /// non-invertible entries, deduplicates, and sorts. Closedness is the
    /// caller's claim; verify with [`GaloisImage::is_closed`].
    pub fn from_elements(m: u64, elements: Vec<ResidueMatrix>) -> Result<Self, Gl2Error> {
        if m < 2 {
            return Err(Gl2Error::Domain("image level must be >= 2"));
        }
        for mat in &elements {
            if mat.level() != m {
                return Err(Gl2Error::Domain("element level does not match image level"));
            }
            if !mat.is_invertible() {
                return Err(Gl2Error::Domain("image element is not invertible"));
            }
        }
        let mut elements = elements;
        elements.sort();
        elements.dedup();
        Ok(GaloisImage { m, elements })
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    pub fn elements(&self) -> &[ResidueMatrix] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Exhaustive check: contains the identity and is closed under
    /// multiplication.
    pub fn is_closed(&self) -> bool {
        let set: HashSet<ResidueMatrix> = self.elements.iter().copied().collect();
        let id = ResidueMatrix::identity(self.m).expect("level >= 2");
        if !set.contains(&id) {
            return false;
        }
        self.elements
            .iter()
            .all(|x| self.elements.iter().all(|y| set.contains(&x.mul(y))))
    }
}

/// `#GL2(Z/mZ) = m^4 prod_{l | m} (1 - 1/l)(1 - 1/l^2)`, exactly.
pub fn gl2_order(m: u64) -> Result<u128, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("gl2_order requires m >= 2"));
    }
    let f = factorize(m)?;
    let mut n = (m as u128).pow(4);
    for &(l, _) in f.factors() {
        let l = l as u128;
        n = n / (l * l * l) * ((l - 1) * (l * l - 1));
    }
    Ok(n)
}

/// `#PGL2(Z/mZ) = m^3 prod_{l | m} (1 - 1/l^2)`, exactly.
pub fn pgl2_order(m: u64) -> Result<u128, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("pgl2_order requires m >= 2"));
    }
    let f = factorize(m)?;
    let mut n = (m as u128).pow(3);
    for &(l, _) in f.factors() {
        let l = l as u128;
        n = n / (l * l) * (l * l - 1);
    }
    Ok(n)
}

/// `#C(m, alpha) = #{M in GL2(Z/mZ): tr M = alpha}`, closed form.
///
/// Per prime power `l^e` the count is `l^(3(e-1))` times the prime-level
/// class size (`l^3 - l^2` for `alpha = 0 mod l`, `l^3 - l^2 - l`
/// otherwise): reduction fibers have `l^4` lifts whose traces equidistribute
/// `l^3` per residue. Multiplicative across coprime levels.
pub fn count_trace_class(m: u64, alpha: i64) -> Result<u128, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("count_trace_class requires m >= 2"));
    }
    let f = factorize(m)?;
    let mut total = 1u128;
    for &(l, e) in f.factors() {
        let lw = l as u128;
        let base = if alpha.rem_euclid(l as i64) == 0 {
            lw * lw * lw - lw * lw
        } else {
            lw * lw * lw - lw * lw - lw
        };
        total *= lw.pow(3 * (e - 1)) * base;
    }
    Ok(total)
}

/// Trace histogram of `GL2(Z/mZ)` by one exhaustive pass: entry `t` counts
/// invertible matrices with trace `t`.
pub fn trace_class_histogram_brute(m: u64) -> Result<Vec<u128>, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("histogram requires m >= 2"));
    }
    if m > MAX_ENUM_LEVEL {
        return Err(Gl2Error::Capacity(m));
    }
    let mut hist = vec![0u128; m as usize];
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mat = ResidueMatrix::from_raw(m, [a, b, c, d]);
                    if mat.is_invertible() {
                        hist[mat.tr() as usize] += 1;
                    }
                }
            }
        }
    }
    Ok(hist)
}

/// `#C(m, alpha)` by exhaustive enumeration; ground truth for small `m`.
pub fn count_trace_class_brute(m: u64, alpha: i64) -> Result<u128, Gl2Error> {
    let hist = trace_class_histogram_brute(m)?;
    Ok(hist[alpha.rem_euclid(m as i64) as usize])
}

/// `#Chat(m, 0)`, the projective trace-zero class: `l^2` for an odd prime,
/// `l^4` for its square, multiplicative over odd squarefree `m`.
pub fn count_projective_trace_zero(m: u64) -> Result<u128, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("count_projective_trace_zero requires m >= 2"));
    }
    if m % 2 == 0 {
        return Err(Gl2Error::Domain(
            "supported shapes are an odd prime, its square, or odd squarefree",
        ));
    }
    let f = factorize(m)?;
    match f.factors() {
        [(l, 1)] => Ok((*l as u128).pow(2)),
        [(l, 2)] => Ok((*l as u128).pow(4)),
        _ if f.is_squarefree() => Ok(f
            .factors()
            .iter()
            .map(|&(l, _)| (l as u128).pow(2))
            .product()),
        _ => Err(Gl2Error::Domain(
            "supported shapes are an odd prime, its square, or odd squarefree",
        )),
    }
}

/// `#Chat(m, 0)` by enumeration. Scaling by a unit `a` maps trace-zero to
/// trace-zero (`tr(aM) = a tr M`), so projective fibers over the class have
/// size `phi(m)` and the count is `#C(m, 0) / phi(m)`.
pub fn count_projective_trace_zero_brute(m: u64) -> Result<u128, Gl2Error> {
    let c = count_trace_class_brute(m, 0)?;
    Ok(c / euler_phi(m)? as u128)
}

/// Smallest multiplicatively closed superset of the generators containing
/// the identity, by breadth-first product closure.
pub fn closure(m: u64, generators: &[ResidueMatrix]) -> Result<GaloisImage, Gl2Error> {
    if m < 2 {
        return Err(Gl2Error::Domain("closure requires level >= 2"));
    }
    for g in generators {
        if g.level() != m {
            return Err(Gl2Error::Domain("generator level does not match"));
        }
        if !g.is_invertible() {
            return Err(Gl2Error::Domain("generator is not invertible"));
        }
    }
    let cap = gl2_order(m)?;
    let id = ResidueMatrix::identity(m)?;
    let mut seen: HashSet<ResidueMatrix> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id);
    queue.push_back(id);
    while let Some(mat) = queue.pop_front() {
        for g in generators {
            let prod = mat.mul(g);
            if seen.insert(prod) {
                queue.push_back(prod);
            }
        }
        assert!(seen.len() as u128 <= cap, "closure exceeded the group order");
    }
    let mut elements: Vec<ResidueMatrix> = seen.into_iter().collect();
    elements.sort();
    Ok(GaloisImage { m, elements })
}

/// Fraction of the image with trace invertible mod the level: `C1`.
pub fn c1_constant(image: &GaloisImage) -> Result<f64, Gl2Error> {
    if image.is_empty() {
        return Err(Gl2Error::Domain("c1_constant requires a nonempty image"));
    }
    let m = image.level();
    let count = image
        .elements()
        .iter()
        .filter(|mat| mat.tr().gcd(&m) == 1)
        .count();
    Ok(count as f64 / image.len() as f64)
}

/// Tail bound for truncating the Euler product at `cutoff`:
/// `sum_{l > y} l^-3 <= 1/(2y^2)`.
pub fn euler_tail_bound(cutoff: u64) -> f64 {
    1.0 / (2.0 * cutoff as f64 * cutoff as f64)
}

/// `prod_{l <= cutoff, l not dividing m_e} (1 - 1/(l^3 - l^2 - l + 1))`.
fn euler_product_raw(m_e: u64, cutoff: u64) -> Result<f64, Gl2Error> {
    let primes = primes_up_to(cutoff)?;
    let mut prod = 1.0f64;
    for &l in primes.iter() {
        if m_e % l == 0 {
            continue;
        }
        let lf = l as f64;
        prod *= 1.0 - 1.0 / (lf * lf * lf - lf * lf - lf + 1.0);
    }
    Ok(prod)
}

fn require_even_level(m_e: u64) -> Result<(), Gl2Error> {
    if m_e < 2 || m_e % 2 != 0 {
        return Err(Gl2Error::Domain("the torsion conductor m_E is even and >= 2"));
    }
    Ok(())
}

fn cutoff_for_tol(tol: f64) -> Result<u64, Gl2Error> {
    if !(tol > 0.0) {
        return Err(Gl2Error::Domain("tolerance must be positive"));
    }
    let needed = (1.0 / (2.0 * tol)).sqrt().ceil() as u64;
    Ok(needed.max(DEFAULT_EULER_CUTOFF))
}

/// `C2 = (m_E/phi(m_E)) prod_{l not dividing m_E} (1 - 1/(l^3 - l^2 - l + 1))`,
/// truncated at an explicit cutoff. Returns `(value, tail_bound)`.
pub fn c2_constant_with_cutoff(m_e: u64, cutoff: u64) -> Result<(f64, f64), Gl2Error> {
    require_even_level(m_e)?;
    let prefactor = m_e as f64 / euler_phi(m_e)? as f64;
    let value = prefactor * euler_product_raw(m_e, cutoff)?;
    Ok((value, euler_tail_bound(cutoff)))
}

/// `C2` truncated at a cutoff whose proven tail is below `tol`.
pub fn c2_constant(m_e: u64, tol: f64) -> Result<f64, Gl2Error> {
    let cutoff = cutoff_for_tol(tol)?;
    Ok(c2_constant_with_cutoff(m_e, cutoff)?.0)
}

/// The constants attached to one Galois image. `C = 2 * C1 * C2` holds by
/// construction and is asserted to `10^-12` when the report is built.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConstantsReport {
    #[serde(rename = "C1")]
    pub c1: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "Cprime")]
    pub cprime: Option<f64>,
    pub euler_tail_bound: f64,
}

/// `C = 2 (m_E/phi(m_E)) * (trace-invertible fraction) * (Euler product)`.
pub fn conjecture_constant(image: &GaloisImage, tol: f64) -> Result<ConstantsReport, Gl2Error> {
    if image.is_empty() {
        return Err(Gl2Error::Domain("conjecture_constant requires a nonempty image"));
    }
    let m = image.level();
    require_even_level(m)?;
    let cutoff = cutoff_for_tol(tol)?;
    let prefactor = m as f64 / euler_phi(m)? as f64;
    let frac = image
        .elements()
        .iter()
        .filter(|mat| mat.tr().gcd(&m) == 1)
        .count() as f64
        / image.len() as f64;
    let raw = euler_product_raw(m, cutoff)?;
    let c = 2.0 * prefactor * frac * raw;
    let report = ConstantsReport {
        c1: frac,
        c2: prefactor * raw,
        c,
        cprime: None,
        euler_tail_bound: euler_tail_bound(cutoff),
    };
    assert!(
        (report.c - 2.0 * report.c1 * report.c2).abs() <= 1e-12,
        "constant identity violated"
    );
    Ok(report)
}

/// The half-trace constant `C'`: the trace condition moves to
/// `tr M in 2 (Z/2m_E Z)^x` inside an image at level `2 m_E`, while the
/// prefactor and Euler product stay at `m_E`.
pub fn half_trace_constant(
    image2: &GaloisImage,
    m_e: u64,
    tol: f64,
) -> Result<f64, Gl2Error> {
    require_even_level(m_e)?;
    if image2.level() != 2 * m_e {
        return Err(Gl2Error::Domain("half-trace image must live at level 2*m_E"));
    }
    if image2.is_empty() {
        return Err(Gl2Error::Domain("half_trace_constant requires a nonempty image"));
    }
    let two_m = 2 * m_e;
    let targets: HashSet<u64> = (1..two_m)
        .filter(|u| u.gcd(&two_m) == 1)
        .map(|u| (2 * u) % two_m)
        .collect();
    let frac = image2
        .elements()
        .iter()
        .filter(|mat| targets.contains(&mat.tr()))
        .count() as f64
        / image2.len() as f64;
    let cutoff = cutoff_for_tol(tol)?;
    let prefactor = m_e as f64 / euler_phi(m_e)? as f64;
    Ok(prefactor * frac * euler_product_raw(m_e, cutoff)?)
}

/// `W(z) = prod_{l < z, l not dividing m_E} (1 - l/(l^2 - 1))`, the sieved
/// density product; `W(z) log z` tends to `e^(-gamma) * C2`-normalisation.
pub fn w_product(m_e: u64, z: f64) -> Result<f64, Gl2Error> {
    require_even_level(m_e)?;
    if !(z > m_e as f64) {
        return Err(Gl2Error::Domain("w_product requires z > m_E"));
    }
    let primes = primes_up_to(z.ceil() as u64)?;
    let mut prod = 1.0f64;
    for &l in primes.iter() {
        if (l as f64) < z && m_e % l != 0 {
            let lf = l as f64;
            prod *= 1.0 - lf / (lf * lf - 1.0);
        }
    }
    Ok(prod)
}

/// Parses the image file format: a `# gl2image v1 m=<int>` header, then one
/// matrix per line as `a,b,c,d` (row-major, reduced mod `m`). The returned
/// image is the closure of the listed matrices.
pub fn parse_image_file(text: &str) -> Result<GaloisImage, Gl2Error> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or(Gl2Error::Domain("empty image file; expected `# gl2image v1 m=<int>`"))?;
    let m: u64 = header
        .strip_prefix("# gl2image v1 m=")
        .and_then(|v| v.parse().ok())
        .ok_or(Gl2Error::Domain("malformed image header; expected `# gl2image v1 m=<int>`"))?;
    let mut mats = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let vals: Vec<i64> = line
            .split(',')
            .map(|t| t.trim().parse::<i64>())
            .collect::<Result<_, _>>()
            .map_err(|_| Gl2Error::Domain("malformed matrix row; expected `a,b,c,d`"))?;
        if vals.len() != 4 {
            return Err(Gl2Error::Domain("matrix rows carry exactly four entries"));
        }
        mats.push(ResidueMatrix::new(m, vals[0], vals[1], vals[2], vals[3])?);
    }
    closure(m, &mats)
}

/// Renders an image in the file format accepted by [`parse_image_file`].
pub fn render_image_file(image: &GaloisImage) -> String {
    use std::fmt::Write as _;
    let mut out = String::new();
    writeln!(out, "# gl2image v1 m={}", image.level()).unwrap();
    for mat in image.elements() {
        let [a, b, c, d] = mat.entries();
        writeln!(out, "{a},{b},{c},{d}").unwrap();
    }
    out
}

/// Verification pass comparing enumeration to every closed form; returns one
/// line per check. All checks must pass for the result to be `Ok(true)`.
pub fn verify_against_enumeration(lmax: u64) -> Result<Vec<(String, bool)>, Gl2Error> {
    if lmax < 3 {
        return Err(Gl2Error::Domain("nothing to check below lmax = 3"));
    }
    let mut checks = Vec::new();
    let odd_primes: Vec<u64> = primes_up_to(lmax)?
        .iter()
        .copied()
        .filter(|&l| l > 2)
        .collect();

    for &l in &odd_primes {
        let hist = trace_class_histogram_brute(l)?;
        let ok = (0..l).all(|alpha| {
            hist[alpha as usize] == count_trace_class(l, alpha as i64).unwrap()
        });
        checks.push((format!("trace classes mod {l} match the closed form"), ok));

        let proj = count_projective_trace_zero_brute(l)? == count_projective_trace_zero(l)?;
        checks.push((format!("projective trace-zero class mod {l}"), proj));
    }

    for &l in odd_primes.iter().filter(|&&l| l <= 7) {
        let m = l * l;
        let brute = count_trace_class_brute(m, 0)?;
        let ok = brute == count_trace_class(m, 0)?;
        checks.push((format!("trace-zero class mod {m} = {brute}"), ok));
        let proj = count_projective_trace_zero_brute(m)? == count_projective_trace_zero(m)?;
        checks.push((format!("projective trace-zero class mod {m}"), proj));
    }

    for m in 2..=12u64 {
        let hist = trace_class_histogram_brute(m)?;
        let sum: u128 = hist.iter().sum();
        checks.push((
            format!("sum of trace classes mod {m} equals #GL2 = {sum}"),
            sum == gl2_order(m)?,
        ));
    }

    let order6 = GaloisImage::full(6)?.len() as u128;
    checks.push((
        format!("#GL2(Z/6Z) = {order6} by enumeration"),
        order6 == 288 && gl2_order(6)? == 288,
    ));

    Ok(checks)
}

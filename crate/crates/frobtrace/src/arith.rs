//! Exact integer arithmetic primitives: prime generation, quadratic-residue
//! symbols, factorization of small integers, and Mertens-sum diagnostics.
//!
//! Everything here is pure and stateless after construction; a [`PrimeList`]
//! is immutable and safely shareable across worker threads.

use thiserror::Error;

/// Largest supported sieve limit. Census workloads stay below `10^7`; the
/// sieve itself is exact up to `2^32`.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 32;

#[derive(Debug, Error)]
pub enum ArithError {
    #[error("limit {0} exceeds the supported sieve range ({MAX_SIEVE_LIMIT})")]
    Capacity(u64),
    #[error("{0}")]
    Domain(&'static str),
}

/// All primes up to a fixed limit, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeList {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeList {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, u64> {
        self.primes.iter()
    }

    /// Membership test; valid for any `n <= limit`.
    pub fn contains(&self, n: u64) -> bool {
        debug_assert!(n <= self.limit);
        self.primes.binary_search(&n).is_ok()
    }
}

/// Number of odd residues per sieve segment; sized to fit in L2 cache.
const SEGMENT_ODDS: usize = 1 << 18;

/// All primes `<= limit` via a segmented sieve of Eratosthenes.
///
/// Only odd residues are sieved; segments cover `2 * SEGMENT_ODDS`
/// consecutive integers so the marking buffer stays cache-resident.
pub fn primes_up_to(limit: u64) -> Result<PrimeList, ArithError> {
    if limit > MAX_SIEVE_LIMIT {
        return Err(ArithError::Capacity(limit));
    }
    let mut primes = Vec::new();
    if limit >= 2 {
        primes.push(2);
    }
    if limit < 3 {
        return Ok(PrimeList { limit, primes });
    }

    let root = limit.isqrt();
    let base = simple_sieve(root);
    let odd_base: Vec<u64> = base.into_iter().filter(|&p| p > 2).collect();

    let mut seg = vec![false; SEGMENT_ODDS];
    let mut low = 3u64;
    while low <= limit {
        // `high` is the largest odd candidate in this segment.
        let mut high = low + 2 * (SEGMENT_ODDS as u64 - 1);
        if high > limit {
            high = if limit % 2 == 0 { limit - 1 } else { limit };
        }
        let n_odds = ((high - low) / 2 + 1) as usize;
        seg[..n_odds].fill(false);
        for &p in &odd_base {
            if p * p > high {
                break;
            }
            let mut start = p * p;
            if start < low {
                let rem = low % p;
                start = if rem == 0 { low } else { low + (p - rem) };
                if start % 2 == 0 {
                    start += p;
                }
            }
            let mut idx = ((start - low) / 2) as usize;
            while idx < n_odds {
                seg[idx] = true;
                idx += p as usize;
            }
        }
        for (i, &composite) in seg[..n_odds].iter().enumerate() {
            if !composite {
                let n = low + 2 * i as u64;
                if n <= limit {
                    primes.push(n);
                }
            }
        }
        low = high + 2;
    }
    Ok(PrimeList { limit, primes })
}

/// Plain boolean sieve, used only for base primes up to `sqrt(limit)`.
fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// `(a * b) mod m` with a 128-bit intermediate.
pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// `base^exp mod m` by square-and-multiply.
pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Legendre symbol `(a | p)` for an odd prime `p`, via the Euler criterion
/// `a^((p-1)/2) mod p`.
///
/// Returns `0` iff `p | a`, `1` iff `a` is a nonzero square mod `p`, and
/// `-1` otherwise. A composite `p` that survives the parity check is caught
/// when the criterion yields a value other than `+-1`.
pub fn legendre_symbol(a: i64, p: u64) -> Result<i32, ArithError> {
    if p < 3 || p % 2 == 0 {
        return Err(ArithError::Domain("legendre_symbol requires an odd prime p >= 3"));
    }
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return Ok(0);
    }
    let e = pow_mod(r, (p - 1) / 2, p);
    if e == 1 {
        Ok(1)
    } else if e == p - 1 {
        Ok(-1)
    } else {
        Err(ArithError::Domain("legendre_symbol: p is not prime"))
    }
}

/// A complete factorization `n = prod p_i^(e_i)` with distinct ascending `p_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    /// Number of distinct prime factors.
    pub fn omega(&self) -> u32 {
        self.factors.len() as u32
    }

    /// Number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn is_prime(&self) -> bool {
        self.big_omega() == 1
    }
}

/// Factorize `n >= 1` by trial division.
///
/// Census arguments satisfy `|a_p| < 2 sqrt(x)`, so trial division by primes
/// up to `sqrt(n)` is never the bottleneck.
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::Domain("factorize requires n >= 1"));
    }
    if n > (1 << 63) {
        return Err(ArithError::Capacity(n));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0u32;
        while *rest % p == 0 {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(2, &mut rest);
    let mut d = 3u64;
    while d * d <= rest {
        push(d, &mut rest);
        d += 2;
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

/// Euler's totient, from the factorization of `n >= 1`.
pub fn euler_phi(n: u64) -> Result<u64, ArithError> {
    let f = factorize(n)?;
    let mut phi = 1u64;
    for &(p, e) in f.factors() {
        phi *= p.pow(e - 1) * (p - 1);
    }
    Ok(phi)
}

/// Deviation `| sum_{l <= y} (log l)/l  -  log y |` in Mertens' first theorem.
///
/// The sum is over primes; the deviation is bounded by 2 for every `y > e`.
pub fn mertens_first_deviation(y: f64) -> Result<f64, ArithError> {
    if !(y > std::f64::consts::E) {
        return Err(ArithError::Domain("mertens_first_deviation requires y > e"));
    }
    let limit = y.floor() as u64;
    let primes = primes_up_to(limit)?;
    let sum: f64 = primes.iter().map(|&p| (p as f64).ln() / p as f64).sum();
    Ok((sum - y.ln()).abs())
}

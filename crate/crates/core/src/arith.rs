//! Exact arithmetic kernel.
//!
//! Scalar functions (`sigma`, `phi`, `largest_prime_factor`, ...) factor
//! their argument with trial division followed by Pollard–Brent, backed by a
//! deterministic Miller–Rabin test that is exact on all of `u64`.
//!
//! Range work goes through [`ArithTable`], a segmented sieve that produces
//! σ(n), φ(n) and the smallest prime factor for every n in `[lo, hi]` while
//! holding only one segment plus the base primes up to √hi in memory.
//!
//! Conventions at n = 1: σ(1) = φ(1) = 1, P(1) = p(1) = rad(1) = 1 and the
//! factorization of 1 is empty.

use crate::error::{Error, Result};

/// Exclusive upper bound for sieved table ranges.
pub const TABLE_LIMIT: u64 = 1 << 48;

/// Exclusive upper bound for scalar `sigma` arguments.
pub const SCALAR_LIMIT: u64 = 1 << 63;

/// Entries per sieve segment. Results do not depend on this value.
pub(crate) const SEGMENT_LEN: u64 = 1 << 20;

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Floor of the square root.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// All primes `<= limit`, by a plain sieve of Eratosthenes over odd numbers.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    // index i stands for 2i + 1
    let half = (limit as usize - 1) / 2 + 1;
    let mut composite = vec![false; half];
    let mut primes = vec![2];
    let mut i = 1;
    while i < half {
        if !composite[i] {
            let p = 2 * i + 1;
            primes.push(p as u64);
            let mut j = (p * p) / 2;
            while j < half {
                composite[j] = true;
                j += p;
            }
        }
        i += 1;
    }
    primes
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

// The first twelve primes are a deterministic witness set below 3.3 * 10^24.
const MR_BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Deterministic primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_BASES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    if n < 41 * 41 {
        return true;
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &MR_BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Prime factorization: `(prime, exponent)` pairs with strictly increasing primes.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn as_slice(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of distinct prime factors.
    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u128 {
        self.factors
            .iter()
            .map(|&(p, e)| (p as u128).pow(e))
            .product()
    }

    /// All positive divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1u64;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }

    /// σ of the factored integer, or `None` if it does not fit in `u64`.
    pub fn sigma(&self) -> Option<u64> {
        let mut acc: u128 = 1;
        for &(p, e) in &self.factors {
            acc = acc.checked_mul(sigma_prime_power(p, e)?)?;
        }
        u64::try_from(acc).ok()
    }

    pub fn phi(&self) -> u64 {
        self.factors
            .iter()
            .map(|&(p, e)| p.pow(e - 1) * (p - 1))
            .product()
    }

    pub fn radical(&self) -> u64 {
        self.primes().product()
    }
}

/// σ(p^e) = 1 + p + ... + p^e.
fn sigma_prime_power(p: u64, e: u32) -> Option<u128> {
    let mut s: u128 = 1;
    for _ in 0..e {
        s = s.checked_mul(p as u128)?.checked_add(1)?;
    }
    Some(s)
}

const TRIAL_LIMIT: u64 = 1000;

/// Factors `n >= 1`. `factorize(1)` is empty.
///
/// Panics if `n == 0`.
pub fn factorize(n: u64) -> Factorization {
    assert!(n > 0, "factorize(0) is undefined");
    let mut factors = Vec::new();
    let mut rest = n;
    let mut push = |rest: &mut u64, p: u64| {
        let mut e = 0;
        while (*rest).is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            factors.push((p, e));
        }
    };
    push(&mut rest, 2);
    push(&mut rest, 3);
    let mut p = 5;
    let mut step = 2;
    while p <= TRIAL_LIMIT && p * p <= rest {
        push(&mut rest, p);
        p += step;
        step = 6 - step;
    }
    if rest > 1 {
        if rest < TRIAL_LIMIT * TRIAL_LIMIT || is_prime(rest) {
            factors.push((rest, 1));
        } else {
            let mut large = Vec::new();
            split_composite(rest, &mut large);
            large.sort_unstable();
            for q in large {
                match factors.last_mut() {
                    Some((last, e)) if *last == q => *e += 1,
                    _ => factors.push((q, 1)),
                }
            }
        }
    }
    Factorization { factors }
}

fn split_composite(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    split_composite(d, out);
    split_composite(n / d, out);
}

/// Returns a nontrivial factor of the odd composite `n`.
fn pollard_brent(n: u64) -> u64 {
    let root = isqrt(n);
    if root * root == n {
        return root;
    }
    for c in 1.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut q) = (2u64, 2u64, 1u64);
        let mut g = 1;
        let mut r = 1u64;
        let mut ys = y;
        const BATCH: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..BATCH.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd(q, n);
                k += BATCH;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
    unreachable!()
}

/// Sum of divisors of `n`.
pub fn sigma(n: u64) -> Result<u64> {
    if n == 0 {
        return Err(Error::usage("sigma is defined for n >= 1"));
    }
    if n >= SCALAR_LIMIT {
        return Err(Error::capacity(format!("sigma argument {n} exceeds 2^63")));
    }
    factorize(n)
        .sigma()
        .ok_or_else(|| Error::capacity(format!("sigma({n}) exceeds 64 bits")))
}

/// Euler's totient. Panics if `n == 0`.
pub fn phi(n: u64) -> u64 {
    factorize(n).phi()
}

/// P(n), with P(1) = 1. Panics if `n == 0`.
pub fn largest_prime_factor(n: u64) -> u64 {
    factorize(n).primes().last().unwrap_or(1)
}

/// p(n), with p(1) = 1. Panics if `n == 0`.
pub fn smallest_prime_factor(n: u64) -> u64 {
    factorize(n).primes().next().unwrap_or(1)
}

/// Product of the distinct primes dividing `n`; rad(1) = 1.
pub fn radical(n: u64) -> u64 {
    factorize(n).radical()
}

/// Per-range tables of σ, φ and smallest prime factor.
///
/// Immutable once built; disjoint ranges may be built concurrently.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithTable {
    lo: u64,
    hi: u64,
    sigma: Vec<u64>,
    phi: Vec<u64>,
    spf: Vec<u64>,
}

impl ArithTable {
    pub fn lo(&self) -> u64 {
        self.lo
    }

    pub fn hi(&self) -> u64 {
        self.hi
    }

    pub fn contains(&self, n: u64) -> bool {
        (self.lo..=self.hi).contains(&n)
    }

    /// σ(n) for `n` in range. Panics otherwise.
    pub fn sigma(&self, n: u64) -> u64 {
        self.sigma[self.index(n)]
    }

    pub fn phi(&self, n: u64) -> u64 {
        self.phi[self.index(n)]
    }

    pub fn spf(&self, n: u64) -> u64 {
        self.spf[self.index(n)]
    }

    pub(crate) fn sigma_slice(&self) -> &[u64] {
        &self.sigma
    }

    fn index(&self, n: u64) -> usize {
        assert!(
            self.contains(n),
            "{n} outside table range [{}, {}]",
            self.lo,
            self.hi
        );
        (n - self.lo) as usize
    }

    pub(crate) fn build_with(lo: u64, hi: u64, base: &BasePrimes, segment_len: u64) -> Self {
        debug_assert!(base.limit >= isqrt(hi));
        let len = (hi - lo + 1) as usize;
        let mut table = ArithTable {
            lo,
            hi,
            sigma: Vec::with_capacity(len),
            phi: Vec::with_capacity(len),
            spf: Vec::with_capacity(len),
        };
        let mut seg_lo = lo;
        loop {
            let seg_hi = hi.min(seg_lo.saturating_add(segment_len - 1));
            table.sieve_segment(seg_lo, seg_hi, &base.primes);
            if seg_hi == hi {
                break;
            }
            seg_lo = seg_hi + 1;
        }
        table
    }

    fn sieve_segment(&mut self, lo: u64, hi: u64, primes: &[u64]) {
        let len = (hi - lo + 1) as usize;
        let mut rest: Vec<u64> = (lo..=hi).collect();
        let mut sigma = vec![1u64; len];
        let mut phi = vec![1u64; len];
        let mut spf = vec![0u64; len];
        for &p in primes {
            if p * p > hi {
                break;
            }
            let first = lo.div_ceil(p) * p;
            let mut m = first;
            while m <= hi {
                let i = (m - lo) as usize;
                let mut r = rest[i] / p;
                let mut pk = p;
                let mut s = 1 + p;
                while r.is_multiple_of(p) {
                    r /= p;
                    pk *= p;
                    s = s * p + 1;
                }
                rest[i] = r;
                sigma[i] *= s;
                phi[i] *= pk - pk / p;
                if spf[i] == 0 {
                    spf[i] = p;
                }
                m += p;
            }
        }
        for i in 0..len {
            let r = rest[i];
            if r > 1 {
                sigma[i] *= r + 1;
                phi[i] *= r - 1;
                if spf[i] == 0 {
                    spf[i] = r;
                }
            } else if spf[i] == 0 {
                // only n = 1 reaches here
                spf[i] = 1;
            }
        }
        self.sigma.extend(sigma);
        self.phi.extend(phi);
        self.spf.extend(spf);
    }
}

/// Sieving primes up to √limit, shared across the segments and blocks of one range.
#[derive(Debug, Clone)]
pub(crate) struct BasePrimes {
    limit: u64,
    primes: Vec<u64>,
}

impl BasePrimes {
    pub(crate) fn for_max(hi: u64) -> Self {
        let limit = isqrt(hi);
        BasePrimes {
            limit,
            primes: primes_up_to(limit),
        }
    }
}

pub(crate) fn check_table_range(lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi {
        return Err(Error::usage(format!(
            "table range must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    if hi >= TABLE_LIMIT {
        return Err(Error::capacity(format!(
            "table bound {hi} is not below 2^48"
        )));
    }
    Ok(())
}

/// Sieves σ, φ and the smallest prime factor over `[lo, hi]`.
pub fn build_table(lo: u64, hi: u64) -> Result<ArithTable> {
    check_table_range(lo, hi)?;
    let base = BasePrimes::for_max(hi);
    Ok(ArithTable::build_with(lo, hi, &base, SEGMENT_LEN))
}

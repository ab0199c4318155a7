//! Smooth-number counting: Ψ(x, y), the prime-power set S, Φ(x, y) and
//! Σ(x, y), plus leading-order evaluators for their asymptotic bounds.
//!
//! Counting goes through [`SmoothTable`], which sieves the largest prime
//! factor of every integer up to 2x + 2 once and derives a per-n key for each
//! counter. A count is then the number of keys on `[1, x]` on the right side
//! of y.
//!
//! The bound evaluators drop every o(·) and (1 + o(1)) factor. They are
//! reporting aids, not certified inequalities.

use rayon::prelude::*;

use crate::arith;
use crate::error::{Error, Result};

/// Largest x accepted by the counters.
pub const SMOOTH_LIMIT: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Counter {
    /// Ψ(x, y): n ≤ x with P(n) ≤ y.
    Psi,
    /// n ≤ x in S.
    S,
    /// Φ(x, y): n ≤ x with P(φ(n)) ≤ y.
    Phi,
    /// Σ(x, y): n ≤ x with P(σ(n)) ≤ y.
    Sigma,
}

impl Counter {
    pub fn name(self) -> &'static str {
        match self {
            Counter::Psi => "psi",
            Counter::S => "s",
            Counter::Phi => "phi",
            Counter::Sigma => "sigma",
        }
    }
}

impl std::str::FromStr for Counter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "psi" => Ok(Counter::Psi),
            "s" => Ok(Counter::S),
            "phi" => Ok(Counter::Phi),
            "sigma" => Ok(Counter::Sigma),
            other => Err(Error::usage(format!(
                "unknown counter '{other}', expected psi, s, phi or sigma"
            ))),
        }
    }
}

/// Largest prime factor of every m in [0, limit]; entries 0 and 1 hold 1.
fn largest_prime_factor_sieve(limit: usize) -> Vec<u32> {
    let mut lpf = vec![0u32; limit + 1];
    lpf[0] = 1;
    if limit >= 1 {
        lpf[1] = 1;
    }
    for p in 2..=limit {
        if lpf[p] == 0 {
            // p is prime; larger primes overwrite later
            let mut m = p;
            while m <= limit {
                lpf[m] = p as u32;
                m += p;
            }
        }
    }
    lpf
}

/// Per-n keys for the four counters on `[1, xmax]`.
#[derive(Debug, Clone)]
pub struct SmoothTable {
    xmax: u64,
    /// P(n)
    psi_key: Vec<u32>,
    /// max p^e over p^e ‖ n with e ≥ 2, or 0; n ∈ S(y) iff this exceeds y
    s_key: Vec<u32>,
    /// P(φ(n))
    phi_key: Vec<u32>,
    /// P(σ(n))
    sigma_key: Vec<u32>,
}

impl SmoothTable {
    pub fn build(xmax: u64) -> Result<Self> {
        if xmax == 0 {
            return Err(Error::usage("x must be positive"));
        }
        if xmax > SMOOTH_LIMIT {
            return Err(Error::capacity(format!(
                "x = {xmax} exceeds the counter limit 2^26"
            )));
        }
        // σ(p^e) < 2p^e ≤ 2x, so P(σ(p^e)) is a table lookup
        let lpf = largest_prime_factor_sieve(2 * xmax as usize + 2);
        let keys: Vec<[u32; 4]> = (1..=xmax)
            .into_par_iter()
            .map(|n| keys_for(n, &lpf))
            .collect();
        let column = |i: usize| keys.iter().map(|k| k[i]).collect();
        Ok(SmoothTable {
            xmax,
            psi_key: column(0),
            s_key: column(1),
            phi_key: column(2),
            sigma_key: column(3),
        })
    }

    pub fn xmax(&self) -> u64 {
        self.xmax
    }

    fn prefix<'a>(&self, keys: &'a [u32], x: u64) -> Result<&'a [u32]> {
        if x > self.xmax {
            return Err(Error::usage(format!(
                "x = {x} beyond table limit {}",
                self.xmax
            )));
        }
        Ok(&keys[..x as usize])
    }

    /// Count for `counter` at (x, y); requires x ≤ `xmax`.
    pub fn count(&self, counter: Counter, x: u64, y: u64) -> Result<u64> {
        let keys = match counter {
            Counter::Psi => &self.psi_key,
            Counter::S => &self.s_key,
            Counter::Phi => &self.phi_key,
            Counter::Sigma => &self.sigma_key,
        };
        let keys = self.prefix(keys, x)?;
        let hits = match counter {
            Counter::S => keys.iter().filter(|&&t| t as u64 > y).count(),
            _ => keys.iter().filter(|&&p| p as u64 <= y).count(),
        };
        Ok(hits as u64)
    }

    /// n ≤ x with P(σ(n)) ≤ y and n ∉ S.
    pub fn sigma_count_outside_s(&self, x: u64, y: u64) -> Result<u64> {
        let sig = self.prefix(&self.sigma_key, x)?;
        let s = self.prefix(&self.s_key, x)?;
        Ok(sig
            .iter()
            .zip(s)
            .filter(|&(&p, &t)| p as u64 <= y && t as u64 <= y)
            .count() as u64)
    }
}

fn keys_for(n: u64, lpf: &[u32]) -> [u32; 4] {
    let big_p = |m: u64| lpf[m as usize] as u64;
    let mut rest = n;
    let (mut s_key, mut phi_key, mut sigma_key) = (0u64, 1u64, 1u64);
    while rest > 1 {
        let p = big_p(rest);
        let mut e = 0u32;
        let mut pk = 1u64;
        while rest.is_multiple_of(p) {
            rest /= p;
            pk *= p;
            e += 1;
        }
        if e >= 2 {
            s_key = s_key.max(pk);
            phi_key = phi_key.max(p);
        }
        phi_key = phi_key.max(big_p(p - 1));
        let sig = (pk * p - 1) / (p - 1);
        sigma_key = sigma_key.max(big_p(sig));
    }
    // every key is at most 2x + 2 < 2^32
    [big_p(n), s_key, phi_key, sigma_key].map(|k| k as u32)
}

/// Ψ(x, y), the number of n ≤ x with P(n) ≤ y.
pub fn psi(x: u64, y: u64) -> Result<u64> {
    if x == 0 || y == 0 {
        return Err(Error::usage("psi needs x >= 1 and y >= 1"));
    }
    if y >= x {
        return Ok(x);
    }
    SmoothTable::build(x)?.count(Counter::Psi, x, y)
}

/// Whether some prime power p^a with a ≥ 2 and p^a > y divides n.
pub fn is_in_s(n: u64, y: u64) -> bool {
    arith::factorize(n)
        .iter()
        .any(|(p, e)| e >= 2 && (p as u128).pow(e) > y as u128)
}

pub fn count_s(x: u64, y: u64) -> Result<u64> {
    SmoothTable::build(x)?.count(Counter::S, x, y)
}

/// Φ(x, y), the number of n ≤ x with P(φ(n)) ≤ y.
pub fn phi_smooth_count(x: u64, y: u64) -> Result<u64> {
    SmoothTable::build(x)?.count(Counter::Phi, x, y)
}

/// Σ(x, y), the number of n ≤ x with P(σ(n)) ≤ y.
pub fn sigma_smooth_count(x: u64, y: u64) -> Result<u64> {
    SmoothTable::build(x)?.count(Counter::Sigma, x, y)
}

/// u = log x / log y.
pub fn u_ratio(x: f64, y: f64) -> f64 {
    x.ln() / y.ln()
}

/// x·exp(−u log u), leading order of the Ψ(x, y) upper bound.
pub fn bound_debruijn(x: f64, y: f64) -> Result<f64> {
    if x <= 1.0 || y <= 1.0 {
        return Err(Error::domain(format!(
            "log u undefined for x={x}, y={y} (need x > 1, y > 1)"
        )));
    }
    let u = u_ratio(x, y);
    Ok(x * (-u * u.ln()).exp())
}

/// x·exp(−u log log u), leading order of the Φ and Σ upper bounds.
pub fn bound_bfps(x: f64, y: f64) -> Result<f64> {
    if x <= 1.0 || y <= 1.0 {
        return Err(Error::domain(format!("u undefined for x={x}, y={y}")));
    }
    let u = u_ratio(x, y);
    let llu = u.ln().ln();
    if llu.is_nan() || llu <= 0.0 {
        return Err(Error::domain(format!(
            "log log u = {llu} is not positive (u = {u})"
        )));
    }
    Ok(x * (-u * llu).exp())
}

/// x·y^(−1/2), the order of the count of S below x.
pub fn bound_s(x: f64, y: f64) -> Result<f64> {
    if y <= 0.0 {
        return Err(Error::domain(format!("y = {y} must be positive")));
    }
    Ok(x / y.sqrt())
}

/// x·exp(−2^(−1/2)·(log x · log log log x)^(1/2)); requires x > e^e.
pub fn bound_main(x: f64) -> Result<f64> {
    let lll = x.ln().ln().ln();
    if lll.is_nan() || lll <= 0.0 {
        return Err(Error::domain(format!(
            "log log log x = {lll} is not positive for x = {x}"
        )));
    }
    Ok(x * (-(x.ln() * lll).sqrt() / std::f64::consts::SQRT_2).exp())
}

/// One counter evaluation with its leading-order bound.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothReport {
    pub counter: Counter,
    pub x: u64,
    pub y: u64,
    pub count: u64,
    /// `None` when bounds were not requested or (x, y) is outside the
    /// bound's domain.
    pub bound_value: Option<f64>,
}

impl SmoothReport {
    /// count / bound, when the bound is present and positive.
    pub fn ratio(&self) -> Option<f64> {
        self.bound_value
            .filter(|&b| b > 0.0)
            .map(|b| self.count as f64 / b)
    }
}

/// The bound paired with each counter.
pub fn leading_bound(counter: Counter, x: u64, y: u64) -> Result<f64> {
    let (x, y) = (x as f64, y as f64);
    match counter {
        Counter::Psi => bound_debruijn(x, y),
        Counter::S => bound_s(x, y),
        Counter::Phi | Counter::Sigma => bound_bfps(x, y),
    }
}

pub fn report(counter: Counter, x: u64, y: u64, with_bound: bool) -> Result<SmoothReport> {
    if x == 0 || y == 0 {
        return Err(Error::usage("x and y must be positive"));
    }
    let count = SmoothTable::build(x)?.count(counter, x, y)?;
    let bound_value = if with_bound {
        match leading_bound(counter, x, y) {
            Ok(b) => Some(b),
            Err(Error::Domain(_)) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(SmoothReport {
        counter,
        x,
        y,
        count,
        bound_value,
    })
}

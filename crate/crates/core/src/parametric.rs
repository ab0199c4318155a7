//! Parametric solution families.
//!
//! A [`Family`] is a tuple (k1, k2, m1, m2) attached to an equation such that
//!
//! ```text
//! σ: m1 = k2·D / (a2(k2 − k1)),  m2 = k1·D / (a1(k2 − k1)),  k1·σ(m1) = k2·σ(m2)
//! φ: m1 = k2·D / (a2(k1 − k2)),  m2 = k1·D / (a1(k1 − k2)),  k1·φ(m1) = k2·φ(m2)
//! ```
//!
//! with D = a1·b2 − a2·b1. Whenever q_i = k_i·l ∓ 1 (− for σ, + for φ) are
//! both primes not dividing m_i, n = (m1·q1 − b1)/a1 solves the equation with
//! a_i·n + b_i = m_i·q_i. Solutions not expressible this way are sporadic.
//!
//! Families are kept in canonical form gcd(k1, k2) = 1: scaling (k1, k2) by c
//! and l by 1/c leaves every q_i unchanged.

use rayon::prelude::*;

use crate::arith::{self, gcd, is_prime, ArithTable, BasePrimes, SEGMENT_LEN, TABLE_LIMIT};
use crate::equations::{EquationSpec, FnKind};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Family {
    pub spec: EquationSpec,
    pub k1: u64,
    pub k2: u64,
    pub m1: u64,
    pub m2: u64,
}

impl Family {
    /// q_i for parameter l: k_i·l − 1 (σ) or k_i·l + 1 (φ). `None` on overflow.
    pub fn primes_at(&self, l: u64) -> Option<(u128, u128)> {
        let q = |k: u64| -> Option<u128> {
            let kl = (k as u128).checked_mul(l as u128)?;
            match self.spec.kind() {
                FnKind::Sigma => kl.checked_sub(1),
                FnKind::Phi => Some(kl + 1),
            }
        };
        Some((q(self.k1)?, q(self.k2)?))
    }
}

/// A parametric solution together with the data that certifies it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Witness {
    pub family: Family,
    pub l: u64,
    pub q1: u64,
    pub q2: u64,
    pub n: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Parametric(Witness),
    Sporadic,
}

impl Verdict {
    pub fn is_parametric(&self) -> bool {
        matches!(self, Verdict::Parametric(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Parametric(w) => Some(w),
            Verdict::Sporadic => None,
        }
    }
}

/// (m1, m2) from the closed forms, if both are positive integers.
///
/// Does not require gcd(k1, k2) = 1 and does not check the divisor identity.
pub fn closed_form(spec: &EquationSpec, k1: u64, k2: u64) -> Option<(u64, u64)> {
    if k1 == 0 || k2 == 0 || k1 == k2 {
        return None;
    }
    let (k1, k2) = (k1 as i128, k2 as i128);
    let diff = match spec.kind() {
        FnKind::Sigma => k2 - k1,
        FnKind::Phi => k1 - k2,
    };
    let d = spec.det();
    let ratio = |num: i128, den: i128| -> Option<u64> {
        let num = num.checked_mul(d)?;
        if num % den != 0 {
            return None;
        }
        let m = num / den;
        (m >= 1).then(|| u64::try_from(m).ok()).flatten()
    };
    let m1 = ratio(k2, spec.a2() as i128 * diff)?;
    let m2 = ratio(k1, spec.a1() as i128 * diff)?;
    Some((m1, m2))
}

fn divisor_identity_holds(kind: FnKind, k1: u64, m1: u64, k2: u64, m2: u64) -> bool {
    match (kind.eval(m1), kind.eval(m2)) {
        (Ok(f1), Ok(f2)) => k1 as u128 * f1 as u128 == k2 as u128 * f2 as u128,
        _ => false,
    }
}

/// The canonical family for the coprime pair (k1, k2), if one exists.
///
/// Returns `None` when k1 = k2, gcd(k1, k2) ≠ 1, the closed forms do not give
/// positive integers, or the divisor identity fails.
pub fn derive_family(spec: &EquationSpec, k1: u64, k2: u64) -> Option<Family> {
    if k1 == 0 || k2 == 0 || gcd(k1, k2) != 1 {
        return None;
    }
    let (m1, m2) = closed_form(spec, k1, k2)?;
    divisor_identity_holds(spec.kind(), k1, m1, k2, m2).then_some(Family {
        spec: *spec,
        k1,
        k2,
        m1,
        m2,
    })
}

/// All canonical families with max(k1, k2) ≤ kmax, sorted by (k1, k2).
///
/// For coprime k1, k2 the closed form for m1 is integral only if the signed
/// difference (k2 − k1 for σ, k1 − k2 for φ) divides D with D's sign, so the
/// enumeration walks those differences instead of all pairs.
pub fn enumerate_families(spec: &EquationSpec, kmax: u64) -> Vec<Family> {
    let d = spec.det();
    let Ok(abs_d) = u64::try_from(d.unsigned_abs()) else {
        return enumerate_all_pairs(spec, kmax);
    };
    let sign: i128 = if d > 0 { 1 } else { -1 };
    let mut out: Vec<Family> = arith::factorize(abs_d)
        .divisors()
        .into_par_iter()
        .flat_map_iter(|t| {
            // k2 = k1 + s for σ, k2 = k1 − s for φ
            let s = sign * t as i128;
            let step = match spec.kind() {
                FnKind::Sigma => s,
                FnKind::Phi => -s,
            };
            (1..=kmax).filter_map(move |k1| {
                let k2 = k1 as i128 + step;
                if k2 < 1 || k2 > kmax as i128 {
                    return None;
                }
                derive_family(spec, k1, k2 as u64)
            })
        })
        .collect();
    out.sort_by_key(|f| (f.k1, f.k2));
    out
}

fn enumerate_all_pairs(spec: &EquationSpec, kmax: u64) -> Vec<Family> {
    (1..=kmax)
        .into_par_iter()
        .flat_map_iter(|k1| (1..=kmax).filter_map(move |k2| derive_family(spec, k1, k2)))
        .collect()
}

/// Witness for parameter l, if both q_i are admissible primes and n is a
/// positive integer.
fn witness_at(family: &Family, l: u64) -> Result<Option<Witness>> {
    let spec = &family.spec;
    let Some((q1, q2)) = family.primes_at(l) else {
        return Err(Error::capacity(format!("q_i overflow at l={l}")));
    };
    if q1.max(q2) >= arith::SCALAR_LIMIT as u128 {
        return Err(Error::capacity(format!("q_i at l={l} exceed 2^63")));
    }
    let (q1, q2) = (q1 as u64, q2 as u64);
    if !is_prime(q1)
        || !is_prime(q2)
        || family.m1.is_multiple_of(q1)
        || family.m2.is_multiple_of(q2)
    {
        return Ok(None);
    }
    let num = family.m1 as i128 * q1 as i128 - spec.b1() as i128;
    let a1 = spec.a1() as i128;
    if num % a1 != 0 || num / a1 < 1 {
        return Ok(None);
    }
    let n = u64::try_from(num / a1)
        .map_err(|_| Error::capacity(format!("n at l={l} exceeds 64 bits")))?;
    let w = Witness {
        family: *family,
        l,
        q1,
        q2,
        n,
    };
    if !verify_witness(&w) {
        return Err(Error::integrity(format!(
            "generated n={n} (l={l}) does not solve {spec}"
        )));
    }
    Ok(Some(w))
}

/// Parametric solutions for l = 1..=lmax, ascending in l.
pub fn generate(family: &Family, lmax: u64) -> Result<Vec<Witness>> {
    let found: Vec<Option<Witness>> = (1..=lmax)
        .into_par_iter()
        .map(|l| witness_at(family, l))
        .collect::<Result<_>>()?;
    Ok(found.into_iter().flatten().collect())
}

/// Checks a witness by direct evaluation of both sides.
pub fn verify_witness(w: &Witness) -> bool {
    let spec = &w.family.spec;
    let Some((x1, x2)) = spec.positive_args(w.n) else {
        return false;
    };
    if x1 as u128 != w.family.m1 as u128 * w.q1 as u128
        || x2 as u128 != w.family.m2 as u128 * w.q2 as u128
    {
        return false;
    }
    match (spec.kind().eval(x1), spec.kind().eval(x2)) {
        (Ok(v1), Ok(v2)) => v1 == v2,
        _ => false,
    }
}

/// Decides whether the solution n is parametric.
///
/// Tries every pair of primes q1 ‖ A1, q2 ‖ A2 (ascending q1, then q2) and
/// accepts the first pair for which, with m_i = A_i/q_i and f(q) = q ± 1,
/// the linear, ratio and divisor identities all hold. The witness uses
/// l = gcd(f(q1), f(q2)) so that k1, k2 are coprime.
pub fn classify(spec: &EquationSpec, n: u64) -> Result<Verdict> {
    let (x1, x2) = spec
        .positive_args(n)
        .ok_or_else(|| Error::usage(format!("n={n} gives a nonpositive argument for {spec}")))?;
    let kind = spec.kind();
    if kind.eval(x1)? != kind.eval(x2)? {
        return Err(Error::usage(format!("n={n} is not a solution of {spec}")));
    }
    let (a1, b1, a2, b2) = (
        spec.a1() as i128,
        spec.b1() as i128,
        spec.a2() as i128,
        spec.b2() as i128,
    );
    let fac1 = arith::factorize(x1);
    let fac2 = arith::factorize(x2);
    let simple = |fac: &arith::Factorization| -> Vec<u64> {
        fac.iter()
            .filter(|&(_, e)| e == 1)
            .map(|(p, _)| p)
            .collect()
    };
    // f(A/q) for a simple prime q, from the cofactor's factorization
    let cofactor_value = |fac: &arith::Factorization, q: u64| -> u128 {
        let mut acc: u128 = 1;
        for (p, e) in fac.iter().filter(|&(p, _)| p != q) {
            let pk = (p as u128).pow(e);
            acc *= match kind {
                FnKind::Sigma => (pk * p as u128 - 1) / (p as u128 - 1),
                FnKind::Phi => pk - pk / p as u128,
            };
        }
        acc
    };
    for q1 in simple(&fac1) {
        let m1 = (x1 / q1) as i128;
        let f_q1 = kind.at_prime(q1) as i128;
        for q2 in simple(&fac2) {
            let m2 = (x2 / q2) as i128;
            let f_q2 = kind.at_prime(q2) as i128;
            let linear = match kind {
                FnKind::Sigma => a2 * (m1 + b1) == a1 * (m2 + b2),
                FnKind::Phi => a2 * (m1 - b1) == a1 * (m2 - b2),
            };
            if !linear || a2 * m1 * f_q1 != a1 * m2 * f_q2 {
                continue;
            }
            let lhs = f_q1 as u128 * cofactor_value(&fac1, q1);
            let rhs = f_q2 as u128 * cofactor_value(&fac2, q2);
            if lhs != rhs {
                continue;
            }
            let l = gcd(f_q1 as u64, f_q2 as u64);
            let family = Family {
                spec: *spec,
                k1: f_q1 as u64 / l,
                k2: f_q2 as u64 / l,
                m1: m1 as u64,
                m2: m2 as u64,
            };
            if derive_family(spec, family.k1, family.k2) != Some(family) {
                return Err(Error::integrity(format!(
                    "pair (q1={q1}, q2={q2}) for n={n} passes the identities but not the closed forms"
                )));
            }
            return Ok(Verdict::Parametric(Witness {
                family,
                l,
                q1,
                q2,
                n,
            }));
        }
    }
    Ok(Verdict::Sporadic)
}

/// The construction n = j((j+k)r/g + 1), g = gcd(j, j+k), for which
/// φ(n) = φ(n + k) whenever j and j+k share their prime factors and
/// jr/g + 1, (j+k)r/g + 1 are primes not dividing j.
pub fn ghp_generate(j: u64, k: u64, r: u64) -> Result<Option<u64>> {
    if j == 0 || k == 0 || r == 0 {
        return Err(Error::usage("ghp_generate needs positive j, k, r"));
    }
    let jk = j
        .checked_add(k)
        .ok_or_else(|| Error::capacity("j + k exceeds 64 bits"))?;
    if arith::radical(j) != arith::radical(jk) {
        return Ok(None);
    }
    let g = gcd(j, jk);
    let p1 = (j / g) as u128 * r as u128 + 1;
    let p2 = (jk / g) as u128 * r as u128 + 1;
    let n = j as u128 * p2;
    if n + k as u128 >= arith::SCALAR_LIMIT as u128 {
        return Err(Error::capacity(format!("n = {n} exceeds 2^63")));
    }
    let (p1, p2, n) = (p1 as u64, p2 as u64, n as u64);
    if !is_prime(p1) || !is_prime(p2) || j.is_multiple_of(p1) || j.is_multiple_of(p2) {
        return Ok(None);
    }
    if arith::phi(n) != arith::phi(n + k) {
        return Err(Error::integrity(format!(
            "construction (j={j}, k={k}, r={r}) gave n={n} with phi(n) != phi(n+k)"
        )));
    }
    Ok(Some(n))
}

/// All m ≤ xmax with m | σ(m) and (m+1) | σ(m+1).
pub fn consecutive_multiperfect_search(xmax: u64) -> Result<Vec<u64>> {
    if xmax == 0 {
        return Err(Error::usage("xmax must be positive"));
    }
    if xmax + 1 >= TABLE_LIMIT {
        return Err(Error::capacity(format!("{xmax} is not below 2^48 - 1")));
    }
    let top = xmax + 1;
    let base = BasePrimes::for_max(top);
    let blocks: Vec<(u64, u64)> = (0..=(top - 1) / SEGMENT_LEN)
        .map(|i| (1 + i * SEGMENT_LEN, top.min((i + 1) * SEGMENT_LEN)))
        .collect();
    // per block: multiperfect members, in order
    let members: Vec<Vec<u64>> = blocks
        .into_par_iter()
        .map(|(lo, hi)| {
            let t = ArithTable::build_with(lo, hi, &base, SEGMENT_LEN);
            t.sigma_slice()
                .iter()
                .zip(lo..)
                .filter(|&(&s, m)| s % m == 0)
                .map(|(_, m)| m)
                .collect()
        })
        .collect();
    let all: Vec<u64> = members.into_iter().flatten().collect();
    Ok(all
        .windows(2)
        .filter(|w| w[1] == w[0] + 1 && w[0] <= xmax)
        .map(|w| w[0])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(kind: FnKind, a1: i64, b1: i64, a2: i64, b2: i64) -> EquationSpec {
        EquationSpec::new(kind, a1, b1, a2, b2).unwrap()
    }

    fn fam(spec: EquationSpec, k1: u64, k2: u64, m1: u64, m2: u64) -> Family {
        Family {
            spec,
            k1,
            k2,
            m1,
            m2,
        }
    }

    #[test]
    fn derive_examples() {
        let s22 = spec(FnKind::Sigma, 1, 0, 1, 22);
        assert_eq!(derive_family(&s22, 3, 14), Some(fam(s22, 3, 14, 28, 6)));
        let moser = spec(FnKind::Phi, 1, 0, 1, 2);
        assert_eq!(derive_family(&moser, 2, 1), Some(fam(moser, 2, 1, 2, 4)));
        // closed forms give (4, 6) but 3·φ(4) ≠ 2·φ(6)
        assert_eq!(closed_form(&moser, 3, 2), Some((4, 6)));
        assert_eq!(derive_family(&moser, 3, 2), None);
        assert_eq!(derive_family(&moser, 4, 2), None);
    }

    #[test]
    fn enumerate_examples() {
        let s22 = spec(FnKind::Sigma, 1, 0, 1, 22);
        assert!(enumerate_families(&s22, 20).contains(&fam(s22, 3, 14, 28, 6)));
        let moser = spec(FnKind::Phi, 1, 0, 1, 2);
        assert_eq!(enumerate_families(&moser, 10), vec![fam(moser, 2, 1, 2, 4)]);
        let s1 = spec(FnKind::Sigma, 1, 0, 1, 1);
        assert!(enumerate_families(&s1, 10_000).is_empty());
    }

    #[test]
    fn generate_examples() {
        let moser = fam(spec(FnKind::Phi, 1, 0, 1, 2), 2, 1, 2, 4);
        let ws = generate(&moser, 10).unwrap();
        // l = 1 gives q2 = 2, which divides m2 = 4
        assert!(ws.iter().all(|w| w.l != 1));
        let w = ws.iter().find(|w| w.l == 2).unwrap();
        assert_eq!((w.q1, w.q2, w.n), (5, 3, 10));

        let s22 = fam(spec(FnKind::Sigma, 1, 0, 1, 22), 3, 14, 28, 6);
        let ws = generate(&s22, 10).unwrap();
        assert!(ws.iter().all(|w| w.l != 1));
        let w = ws.iter().find(|w| w.l == 6).unwrap();
        assert_eq!((w.q1, w.q2, w.n), (17, 83, 476));
        assert!(generate(&s22, 0).unwrap().is_empty());
    }

    #[test]
    fn verify_examples() {
        let s22 = fam(spec(FnKind::Sigma, 1, 0, 1, 22), 3, 14, 28, 6);
        let w = Witness {
            family: s22,
            l: 6,
            q1: 17,
            q2: 83,
            n: 476,
        };
        assert!(verify_witness(&w));
        let moser = fam(spec(FnKind::Phi, 1, 0, 1, 2), 2, 1, 2, 4);
        assert!(verify_witness(&Witness {
            family: moser,
            l: 2,
            q1: 5,
            q2: 3,
            n: 10
        }));
        assert!(!verify_witness(&Witness { n: 477, ..w }));
    }

    #[test]
    fn classify_examples() {
        let s22 = spec(FnKind::Sigma, 1, 0, 1, 22);
        let v = classify(&s22, 476).unwrap();
        let w = v.witness().unwrap();
        assert_eq!((w.q1, w.q2, w.l), (17, 83, 6));
        assert_eq!(w.family, fam(s22, 3, 14, 28, 6));

        assert_eq!(
            classify(&spec(FnKind::Phi, 1, 0, 1, 1), 15).unwrap(),
            Verdict::Sporadic
        );

        let moser = spec(FnKind::Phi, 1, 0, 1, 2);
        let w = *classify(&moser, 10).unwrap().witness().unwrap();
        assert_eq!(
            w,
            Witness {
                family: fam(moser, 2, 1, 2, 4),
                l: 2,
                q1: 5,
                q2: 3,
                n: 10
            }
        );

        assert!(matches!(classify(&s22, 477), Err(Error::Usage(_))));
    }

    #[test]
    fn ghp_examples() {
        assert_eq!(ghp_generate(2, 2, 2).unwrap(), Some(10));
        assert_eq!(ghp_generate(2, 2, 1).unwrap(), None);
        assert_eq!(ghp_generate(12, 6, 2).unwrap(), Some(84));
        assert_eq!(arith::phi(84), arith::phi(90));
        // different radicals
        assert_eq!(ghp_generate(2, 1, 1).unwrap(), None);
    }

    #[test]
    fn ghp_outputs_always_solve() {
        for j in 1..60u64 {
            for k in 1..60u64 {
                for r in 1..20u64 {
                    if let Some(n) = ghp_generate(j, k, r).unwrap() {
                        assert_eq!(arith::phi(n), arith::phi(n + k));
                    }
                }
            }
        }
    }

    #[test]
    fn multiperfect_examples() {
        assert!(consecutive_multiperfect_search(1).unwrap().is_empty());
        assert!(consecutive_multiperfect_search(5).unwrap().is_empty());
    }

    #[test]
    fn family_identities() {
        let specs = [
            spec(FnKind::Sigma, 1, 0, 1, 22),
            spec(FnKind::Sigma, 2, 1, 3, 5),
            spec(FnKind::Sigma, 1, -3, 2, 7),
            spec(FnKind::Phi, 1, 0, 1, 2),
            spec(FnKind::Phi, 1, 0, 1, 6),
            spec(FnKind::Phi, 3, 1, 1, 4),
            spec(FnKind::Phi, 1, 5, 1, -7),
        ];
        let mut seen = 0;
        for s in specs {
            for f in enumerate_families(&s, 60) {
                seen += 1;
                let (a1, b1, a2, b2) = (
                    s.a1() as i128,
                    s.b1() as i128,
                    s.a2() as i128,
                    s.b2() as i128,
                );
                let (m1, m2, k1, k2) = (f.m1 as i128, f.m2 as i128, f.k1 as i128, f.k2 as i128);
                let lin = a2 * m1 - a1 * m2;
                match s.kind() {
                    FnKind::Sigma => assert_eq!(lin, a1 * b2 - a2 * b1),
                    FnKind::Phi => assert_eq!(lin, a2 * b1 - a1 * b2),
                }
                assert_eq!(a2 * m1 * k1, a1 * m2 * k2);
                if s.kind() == FnKind::Phi && a1 == a2 {
                    assert_eq!(arith::radical(f.m1), arith::radical(f.m2));
                    assert_eq!(m2 - m1, b2 - b1);
                }
                for w in generate(&f, 200).unwrap() {
                    assert!(verify_witness(&w));
                    assert!(classify(&s, w.n).unwrap().is_parametric());
                }
            }
        }
        assert!(seen > 5, "fixture specs should admit some families");
    }

    #[test]
    fn enumeration_matches_exhaustive_pairs() {
        for s in [
            spec(FnKind::Sigma, 1, 0, 1, 22),
            spec(FnKind::Phi, 1, 0, 1, 6),
            spec(FnKind::Sigma, 2, 1, 3, 5),
            spec(FnKind::Phi, 1, 5, 1, -7),
            spec(FnKind::Phi, 2, 0, 3, 12),
        ] {
            let mut brute = Vec::new();
            for k1 in 1..=80 {
                for k2 in 1..=80 {
                    if let Some(f) = derive_family(&s, k1, k2) {
                        brute.push(f);
                    }
                }
            }
            assert_eq!(enumerate_families(&s, 80), brute, "{s}");
        }
    }

    #[test]
    fn classification_is_scale_invariant() {
        // Non-coprime (k1·c, k2·c) paired with l/c reproduce the same m's and q's.
        let s22 = spec(FnKind::Sigma, 1, 0, 1, 22);
        let w = *classify(&s22, 476).unwrap().witness().unwrap();
        let (f1, f2) = (w.q1 + 1, w.q2 + 1);
        // l = 1: k_i = q_i + 1
        assert_eq!(closed_form(&s22, f1, f2), Some((w.family.m1, w.family.m2)));
        assert_eq!(
            f1 * arith::sigma(w.family.m1).unwrap(),
            f2 * arith::sigma(w.family.m2).unwrap()
        );
        // l = gcd
        let g = gcd(f1, f2);
        assert_eq!(g, w.l);
        assert_eq!(closed_form(&s22, f1 / g, f2 / g), closed_form(&s22, f1, f2));
    }

    #[test]
    fn odd_shift_phi_has_no_families() {
        for k in (1..=15).step_by(2) {
            let s = spec(FnKind::Phi, 1, 0, 1, k);
            assert!(enumerate_families(&s, 10_000).is_empty(), "k={k}");
        }
    }
}

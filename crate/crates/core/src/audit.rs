//! Bucket audit for sporadic solutions.
//!
//! Every sporadic solution n ≤ x is assigned to one bucket:
//!
//! * `B1`: a1·n + b1 or a2·n + b2 lies in S (a prime power p^a > y, a ≥ 2, divides it);
//! * `B2`: otherwise, P(f(a1·n + b1)) < y;
//! * `B3`/`B4`: otherwise, with p = P(f(a1·n + b1)) ≥ y, both arguments
//!   decompose as a_i·n + b_i = m_i(k_i·p ∓ 1) where k_i·p ∓ 1 is a prime not
//!   dividing m_i; the bucket is B3 when m1·m2 ≤ x/z and B4 otherwise.
//!
//! The sign is − for σ and + for φ throughout. Every decomposition satisfies
//! f(m1)·k1 = f(m2)·k2.

use std::fmt;

use crate::arith::{self, is_prime};
use crate::equations::{EquationSpec, FnKind};
use crate::error::{Error, Result};
use crate::parametric::{self, Verdict};
use crate::smoothness;

/// Audit thresholds. Derived fields are always recomputed from (x, y, z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditParams {
    pub x: u64,
    pub y: f64,
    pub z: f64,
    pub z1: f64,
    pub z2: f64,
    pub u: f64,
    pub overridden: bool,
}

impl AuditParams {
    /// y = exp(√2·(log x · log log log x)^(1/2)), z = √y.
    pub fn default_for(x: u64) -> Result<Self> {
        if x < 16 {
            return Err(Error::domain(format!(
                "audit parameters need x >= 16 so that log log log x > 0, got {x}"
            )));
        }
        let lx = (x as f64).ln();
        let y = (std::f64::consts::SQRT_2 * (lx * lx.ln().ln()).sqrt()).exp();
        Ok(Self::derive(x, y, y.sqrt(), false))
    }

    /// Explicit (y, z), for exercising the buckets at small x.
    pub fn with_overrides(x: u64, y: f64, z: f64) -> Result<Self> {
        if x == 0 {
            return Err(Error::usage("x must be positive"));
        }
        if !(y >= 1.0 && y.is_finite()) || !(z > 0.0 && z.is_finite()) {
            return Err(Error::usage(format!(
                "overrides need finite y >= 1 and z > 0, got y={y}, z={z}"
            )));
        }
        Ok(Self::derive(x, y, z, true))
    }

    fn derive(x: u64, y: f64, z: f64, overridden: bool) -> Self {
        let xf = x as f64;
        let log_xz = (xf / z).ln();
        AuditParams {
            x,
            y,
            z,
            z1: z / log_xz,
            z2: y * log_xz,
            u: xf.ln() / y.ln(),
            overridden,
        }
    }

    /// x/z, the B3/B4 threshold on m1·m2.
    pub fn split(&self) -> f64 {
        self.x as f64 / self.z
    }
}

pub fn default_params(x: u64) -> Result<AuditParams> {
    AuditParams::default_for(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bucket {
    B1,
    B2,
    B3,
    B4,
}

impl fmt::Display for Bucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Bucket::B1 => "B1",
            Bucket::B2 => "B2",
            Bucket::B3 => "B3",
            Bucket::B4 => "B4",
        };
        f.write_str(s)
    }
}

/// a_i·n + b_i = m_i·(k_i·p ∓ 1), i = 1, 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Decomposition {
    pub p: u64,
    pub m1: u64,
    pub k1: u64,
    pub m2: u64,
    pub k2: u64,
}

impl Decomposition {
    fn prime(kind: FnKind, k: u64, p: u64) -> u128 {
        let kp = k as u128 * p as u128;
        match kind {
            FnKind::Sigma => kp - 1,
            FnKind::Phi => kp + 1,
        }
    }

    /// The two primes k_i·p ∓ 1.
    pub fn primes(&self, kind: FnKind) -> (u128, u128) {
        (
            Self::prime(kind, self.k1, self.p),
            Self::prime(kind, self.k2, self.p),
        )
    }

    /// m_i·(k_i·p ∓ 1) = a_i·n + b_i for both i.
    pub fn reconstructs(&self, spec: &EquationSpec, n: u64) -> bool {
        let (x1, x2) = spec.args(n);
        let (q1, q2) = self.primes(spec.kind());
        self.m1 as i128 * q1 as i128 == x1 && self.m2 as i128 * q2 as i128 == x2
    }

    /// f(m1)·k1 = f(m2)·k2.
    pub fn divisor_identity(&self, kind: FnKind) -> bool {
        match (kind.eval(self.m1), kind.eval(self.m2)) {
            (Ok(f1), Ok(f2)) => f1 as u128 * self.k1 as u128 == f2 as u128 * self.k2 as u128,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BucketVerdict {
    pub bucket: Bucket,
    /// Present iff the bucket is B3 or B4.
    pub decomposition: Option<Decomposition>,
    /// P(f(a1·n + b1)) equals y exactly, so the strict B2 test decided the
    /// bucket at its boundary.
    pub b2_boundary: bool,
}

/// Smallest prime q ‖ a with q ≡ ∓1 (mod p).
fn matching_prime(kind: FnKind, a: u64, p: u64) -> Option<u64> {
    arith::factorize(a)
        .iter()
        .filter(|&(_, e)| e == 1)
        .map(|(q, _)| q)
        .find(|&q| kind.at_prime(q).is_multiple_of(p))
}

/// Assigns the sporadic solution n to its bucket under `params`.
///
/// Fails with a usage error if n is not a sporadic solution, and with an
/// integrity error if n falls through B1 and B2 but admits no decomposition.
pub fn assign_bucket(spec: &EquationSpec, n: u64, params: &AuditParams) -> Result<BucketVerdict> {
    match parametric::classify(spec, n)? {
        Verdict::Sporadic => {}
        Verdict::Parametric(_) => {
            return Err(Error::usage(format!(
                "n={n} is a parametric solution of {spec}"
            )));
        }
    }
    let (x1, x2) = spec
        .positive_args(n)
        .expect("classified solutions have positive arguments");
    let kind = spec.kind();
    // p^a > y with p^a an integer is the same as p^a > ⌊y⌋
    let y_floor = params.y.floor() as u64;
    if smoothness::is_in_s(x1, y_floor) || smoothness::is_in_s(x2, y_floor) {
        return Ok(BucketVerdict {
            bucket: Bucket::B1,
            decomposition: None,
            b2_boundary: false,
        });
    }
    let p = arith::largest_prime_factor(kind.eval(x1)?);
    let b2_boundary = p as f64 == params.y;
    if (p as f64) < params.y {
        return Ok(BucketVerdict {
            bucket: Bucket::B2,
            decomposition: None,
            b2_boundary,
        });
    }
    let find = |a: u64, side: u32| {
        matching_prime(kind, a, p).ok_or_else(|| {
            Error::integrity(format!(
                "n={n}: argument {side} = {a} has no simple prime q with q {} 1 ≡ 0 (mod {p}) for {spec}",
                match kind {
                    FnKind::Sigma => "+",
                    FnKind::Phi => "-",
                }
            ))
        })
    };
    let q1 = find(x1, 1)?;
    let q2 = find(x2, 2)?;
    let dec = Decomposition {
        p,
        m1: x1 / q1,
        k1: kind.at_prime(q1) / p,
        m2: x2 / q2,
        k2: kind.at_prime(q2) / p,
    };
    debug_assert!(is_prime(q1) && is_prime(q2));
    let bucket = if (dec.m1 as f64) * (dec.m2 as f64) <= params.split() {
        Bucket::B3
    } else {
        Bucket::B4
    };
    Ok(BucketVerdict {
        bucket,
        decomposition: Some(dec),
        b2_boundary,
    })
}

/// Whether p divides a2(b1 + m1) − a1(b2 + m2) (σ) or a2(b1 − m1) − a1(b2 − m2) (φ).
///
/// Requires a decomposition with a2·m1·k1 ≠ a1·m2·k2.
pub fn check_p_divisibility(spec: &EquationSpec, verdict: &BucketVerdict) -> Result<bool> {
    let dec = verdict.decomposition.ok_or_else(|| {
        Error::usage(format!(
            "bucket {} carries no decomposition",
            verdict.bucket
        ))
    })?;
    let (a1, b1, a2, b2) = (
        spec.a1() as i128,
        spec.b1() as i128,
        spec.a2() as i128,
        spec.b2() as i128,
    );
    let (m1, m2) = (dec.m1 as i128, dec.m2 as i128);
    if a2 * m1 * dec.k1 as i128 == a1 * m2 * dec.k2 as i128 {
        return Err(Error::usage(
            "degenerate decomposition: a2*m1*k1 = a1*m2*k2",
        ));
    }
    let d = match spec.kind() {
        FnKind::Sigma => a2 * (b1 + m1) - a1 * (b2 + m2),
        FnKind::Phi => a2 * (b1 - m1) - a1 * (b2 - m2),
    };
    Ok(d % dec.p as i128 == 0)
}

/// One audited solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuditRow {
    pub n: u64,
    pub verdict: BucketVerdict,
}

/// Audits every sporadic solution n ≤ x, ascending. Stops at the first
/// integrity error.
pub fn audit(spec: &EquationSpec, params: &AuditParams) -> Result<Vec<AuditRow>> {
    use crate::equations::{search_classified, Classification};
    use rayon::prelude::*;

    let sporadic: Vec<u64> = search_classified(spec, params.x)?
        .into_iter()
        .filter(|r| r.classification == Classification::Sporadic)
        .map(|r| r.n)
        .collect();
    sporadic
        .into_par_iter()
        .map(|n| {
            Ok(AuditRow {
                n,
                verdict: assign_bucket(spec, n, params)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_consecutive() -> EquationSpec {
        EquationSpec::new(FnKind::Sigma, 1, 0, 1, 1).unwrap()
    }

    #[test]
    fn default_params_at_one_million() {
        let p = default_params(1_000_000).unwrap();
        // mpmath: u = 2.674969000852310, y = 174.9913764842666
        assert!((p.u - 2.674_969_000_852_31).abs() < 1e-9);
        assert!((p.y - 174.991_376_484_266_6).abs() < 1e-7);
        assert_eq!(p.z, p.y.sqrt());
        assert!(!p.overridden);
        let lx = (1e6f64).ln();
        let closed = lx.sqrt() / (std::f64::consts::SQRT_2 * lx.ln().ln().sqrt());
        assert!((p.u - closed).abs() < 1e-12);
    }

    #[test]
    fn default_params_domain() {
        assert!(matches!(default_params(15), Err(Error::Domain(_))));
        assert!(default_params(16).is_ok());
    }

    #[test]
    fn bucket_examples_at_fourteen() {
        let spec = sigma_consecutive();
        let params = AuditParams::with_overrides(100, 3.0, 2.0).unwrap();
        let v = assign_bucket(&spec, 14, &params).unwrap();
        assert_eq!(v.bucket, Bucket::B3);
        assert_eq!(
            v.decomposition,
            Some(Decomposition {
                p: 3,
                m1: 7,
                k1: 1,
                m2: 3,
                k2: 2
            })
        );
        assert!(v.b2_boundary);
        assert!(check_p_divisibility(&spec, &v).unwrap());

        let v = assign_bucket(
            &spec,
            14,
            &AuditParams::with_overrides(100, 5.0, 2.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.bucket, Bucket::B2);
        assert_eq!(v.decomposition, None);

        // x/z = 100/10 = 10 < 21 = m1·m2
        let v = assign_bucket(
            &spec,
            14,
            &AuditParams::with_overrides(100, 3.0, 10.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.bucket, Bucket::B4);
    }

    #[test]
    fn b1_when_argument_has_large_square() {
        // σ(206) = σ(207) = 312; 207 = 3²·23, and 9 > 8
        let spec = sigma_consecutive();
        let v = assign_bucket(
            &spec,
            206,
            &AuditParams::with_overrides(1000, 8.0, 3.0).unwrap(),
        )
        .unwrap();
        assert_eq!(v.bucket, Bucket::B1);
    }

    #[test]
    fn two_hundred_six_has_no_decomposition_at_p_13() {
        // p = P(312) = 13; 207 = 3²·23 has no simple prime q with 13 | q + 1
        let spec = sigma_consecutive();
        let params = AuditParams::with_overrides(1000, 9.0, 3.0).unwrap();
        assert!(matches!(
            assign_bucket(&spec, 206, &params),
            Err(Error::Integrity(_))
        ));
    }

    #[test]
    fn check_p_requires_decomposition() {
        let spec = sigma_consecutive();
        let v = BucketVerdict {
            bucket: Bucket::B2,
            decomposition: None,
            b2_boundary: false,
        };
        assert!(matches!(
            check_p_divisibility(&spec, &v),
            Err(Error::Usage(_))
        ));
        let degenerate = BucketVerdict {
            bucket: Bucket::B3,
            decomposition: Some(Decomposition {
                p: 3,
                m1: 2,
                k1: 1,
                m2: 1,
                k2: 2,
            }),
            b2_boundary: false,
        };
        assert!(matches!(
            check_p_divisibility(&spec, &degenerate),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn rejects_non_sporadic() {
        let s22 = EquationSpec::new(FnKind::Sigma, 1, 0, 1, 22).unwrap();
        let params = AuditParams::with_overrides(1000, 3.0, 2.0).unwrap();
        assert!(matches!(
            assign_bucket(&s22, 476, &params),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            assign_bucket(&s22, 477, &params),
            Err(Error::Usage(_))
        ));
    }

    #[test]
    fn phi_audit_is_total_with_defaults() {
        // φ has no prime-power gap: p | φ(q^a) with a ≥ 2 forces q^a > y
        for b2 in [1, 3, 5] {
            let spec = EquationSpec::new(FnKind::Phi, 1, 0, 1, b2).unwrap();
            let params = default_params(20_000).unwrap();
            for row in audit(&spec, &params).unwrap() {
                if let Some(dec) = row.verdict.decomposition {
                    assert!(dec.reconstructs(&spec, row.n));
                    assert!(dec.divisor_identity(FnKind::Phi));
                    assert!(check_p_divisibility(&spec, &row.verdict).unwrap());
                }
            }
        }
    }
}

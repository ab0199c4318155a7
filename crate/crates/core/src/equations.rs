//! Exhaustive search for solutions n ≤ x of f(a1·n + b1) = f(a2·n + b2),
//! f ∈ {σ, φ}.
//!
//! The search walks `[1, x]` in blocks, sieving σ/φ over the two argument
//! ranges of each block. Blocks run in parallel and are merged in order, so
//! results are ascending in n and independent of the thread count.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::arith::{self, ArithTable, BasePrimes, SEGMENT_LEN, TABLE_LIMIT};
use crate::error::{Error, Result};
use crate::parametric::{self, Verdict};

/// The arithmetic function on both sides of an equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FnKind {
    Sigma,
    Phi,
}

impl FnKind {
    pub fn name(self) -> &'static str {
        match self {
            FnKind::Sigma => "sigma",
            FnKind::Phi => "phi",
        }
    }

    /// Evaluates the function at `n >= 1`.
    pub fn eval(self, n: u64) -> Result<u64> {
        if n == 0 {
            return Err(Error::usage(format!(
                "{} is defined for n >= 1",
                self.name()
            )));
        }
        match self {
            FnKind::Sigma => arith::sigma(n),
            FnKind::Phi => Ok(arith::phi(n)),
        }
    }

    /// f(q) for a prime q: q + 1 for σ, q − 1 for φ.
    pub(crate) fn at_prime(self, q: u64) -> u64 {
        match self {
            FnKind::Sigma => q + 1,
            FnKind::Phi => q - 1,
        }
    }

    fn lookup(self, table: &ArithTable, n: u64) -> u64 {
        match self {
            FnKind::Sigma => table.sigma(n),
            FnKind::Phi => table.phi(n),
        }
    }
}

impl fmt::Display for FnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FnKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigma" => Ok(FnKind::Sigma),
            "phi" => Ok(FnKind::Phi),
            other => Err(Error::usage(format!(
                "unknown function '{other}', expected sigma or phi"
            ))),
        }
    }
}

/// One equation instance f(a1·n + b1) = f(a2·n + b2).
///
/// Always satisfies a1 > 0, a2 > 0 and a1·b2 − a2·b1 ≠ 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EquationSpec {
    kind: FnKind,
    a1: i64,
    b1: i64,
    a2: i64,
    b2: i64,
}

impl EquationSpec {
    pub fn new(kind: FnKind, a1: i64, b1: i64, a2: i64, b2: i64) -> Result<Self> {
        if a1 <= 0 || a2 <= 0 {
            return Err(Error::usage(format!(
                "leading coefficients must be positive, got a1={a1}, a2={a2}"
            )));
        }
        let spec = EquationSpec {
            kind,
            a1,
            b1,
            a2,
            b2,
        };
        if spec.det() == 0 {
            return Err(Error::usage(format!(
                "degenerate equation: a1*b2 - a2*b1 = 0 for ({a1}, {b1}, {a2}, {b2})"
            )));
        }
        Ok(spec)
    }

    pub fn kind(&self) -> FnKind {
        self.kind
    }

    pub fn a1(&self) -> i64 {
        self.a1
    }

    pub fn b1(&self) -> i64 {
        self.b1
    }

    pub fn a2(&self) -> i64 {
        self.a2
    }

    pub fn b2(&self) -> i64 {
        self.b2
    }

    /// a1·b2 − a2·b1.
    pub fn det(&self) -> i128 {
        self.a1 as i128 * self.b2 as i128 - self.a2 as i128 * self.b1 as i128
    }

    /// The two arguments (a1·n + b1, a2·n + b2), unbounded.
    pub fn args(&self, n: u64) -> (i128, i128) {
        let n = n as i128;
        (
            self.a1 as i128 * n + self.b1 as i128,
            self.a2 as i128 * n + self.b2 as i128,
        )
    }

    /// Both arguments when they are positive and fit in `u64`.
    pub fn positive_args(&self, n: u64) -> Option<(u64, u64)> {
        let (x1, x2) = self.args(n);
        if x1 < 1 || x2 < 1 {
            return None;
        }
        Some((u64::try_from(x1).ok()?, u64::try_from(x2).ok()?))
    }

    /// Whether n solves the equation (false when an argument is nonpositive).
    pub fn is_solution(&self, n: u64) -> Result<bool> {
        match self.positive_args(n) {
            Some((x1, x2)) => Ok(self.kind.eval(x1)? == self.kind.eval(x2)?),
            None => Ok(false),
        }
    }
}

impl fmt::Display for EquationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{k}({a1}n{b1:+}) = {k}({a2}n{b2:+})",
            k = self.kind,
            a1 = self.a1,
            b1 = self.b1,
            a2 = self.a2,
            b2 = self.b2
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Classification {
    Parametric,
    Sporadic,
    Unclassified,
}

impl Classification {
    pub fn name(self) -> &'static str {
        match self {
            Classification::Parametric => "parametric",
            Classification::Sporadic => "sporadic",
            Classification::Unclassified => "unclassified",
        }
    }
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolutionRecord {
    pub n: u64,
    pub arg1: u64,
    pub arg2: u64,
    pub value: u64,
    pub classification: Classification,
}

// Table entries sieved per block and argument.
const BLOCK_SPAN: u64 = SEGMENT_LEN / 4;

fn check_search_range(spec: &EquationSpec, lo: u64, hi: u64) -> Result<()> {
    if lo == 0 || lo > hi {
        return Err(Error::usage(format!(
            "search range must satisfy 1 <= lo <= hi, got [{lo}, {hi}]"
        )));
    }
    let (x1, x2) = spec.args(hi);
    if x1.max(x2) >= TABLE_LIMIT as i128 {
        return Err(Error::capacity(format!(
            "arguments at n={hi} reach {}, not below 2^48",
            x1.max(x2)
        )));
    }
    Ok(())
}

/// All solutions n in `[1, xmax]`, ascending, unclassified.
pub fn search(spec: &EquationSpec, xmax: u64) -> Result<Vec<SolutionRecord>> {
    search_range(spec, 1, xmax)
}

/// All solutions n in `[lo, hi]`, ascending, unclassified.
///
/// n for which either argument is below 1 are skipped.
pub fn search_range(spec: &EquationSpec, lo: u64, hi: u64) -> Result<Vec<SolutionRecord>> {
    check_search_range(spec, lo, hi)?;
    let (x1, x2) = spec.args(hi);
    let base = BasePrimes::for_max(x1.max(x2).max(1) as u64);
    let per_block = (BLOCK_SPAN / spec.a1.max(spec.a2) as u64).max(1);
    let blocks: Vec<(u64, u64)> = (0..=(hi - lo) / per_block)
        .map(|i| {
            let start = lo + i * per_block;
            (start, hi.min(start + per_block - 1))
        })
        .collect();
    let found: Vec<Vec<SolutionRecord>> = blocks
        .into_par_iter()
        .map(|(start, end)| search_block(spec, start, end, &base))
        .collect();
    Ok(found.into_iter().flatten().collect())
}

/// The positive part of {a·n + b : n ∈ [start, end]}.
fn positive_span(a: i64, b: i64, start: u64, end: u64) -> Option<(u64, u64)> {
    let lo = a as i128 * start as i128 + b as i128;
    let hi = a as i128 * end as i128 + b as i128;
    (hi >= 1).then(|| (lo.max(1) as u64, hi as u64))
}

fn search_block(
    spec: &EquationSpec,
    start: u64,
    end: u64,
    base: &BasePrimes,
) -> Vec<SolutionRecord> {
    let Some(span1) = positive_span(spec.a1, spec.b1, start, end) else {
        return Vec::new();
    };
    let Some(span2) = positive_span(spec.a2, spec.b2, start, end) else {
        return Vec::new();
    };
    let len = |(lo, hi): (u64, u64)| hi - lo + 1;
    let union = (span1.0.min(span2.0), span1.1.max(span2.1));
    let (t1, t2);
    let (tab1, tab2): (&ArithTable, &ArithTable) = if len(union) <= len(span1) + len(span2) {
        t1 = ArithTable::build_with(union.0, union.1, base, SEGMENT_LEN);
        (&t1, &t1)
    } else {
        t1 = ArithTable::build_with(span1.0, span1.1, base, SEGMENT_LEN);
        t2 = ArithTable::build_with(span2.0, span2.1, base, SEGMENT_LEN);
        (&t1, &t2)
    };
    let kind = spec.kind;
    (start..=end)
        .filter_map(|n| {
            let (x1, x2) = spec.positive_args(n)?;
            let v1 = kind.lookup(tab1, x1);
            (v1 == kind.lookup(tab2, x2)).then_some(SolutionRecord {
                n,
                arg1: x1,
                arg2: x2,
                value: v1,
                classification: Classification::Unclassified,
            })
        })
        .collect()
}

/// Solutions in `[1, xmax]` with each record classified.
pub fn search_classified(spec: &EquationSpec, xmax: u64) -> Result<Vec<SolutionRecord>> {
    let mut records = search(spec, xmax)?;
    records.par_iter_mut().try_for_each(|rec| -> Result<()> {
        rec.classification = match parametric::classify(spec, rec.n)? {
            Verdict::Parametric(_) => Classification::Parametric,
            Verdict::Sporadic => Classification::Sporadic,
        };
        Ok(())
    })?;
    Ok(records)
}

pub fn count_raw(spec: &EquationSpec, xmax: u64) -> Result<u64> {
    Ok(search(spec, xmax)?.len() as u64)
}

/// Number of solutions n ≤ xmax that are not of parametric form.
pub fn count_sporadic(spec: &EquationSpec, xmax: u64) -> Result<u64> {
    Ok(search_classified(spec, xmax)?
        .iter()
        .filter(|r| r.classification == Classification::Sporadic)
        .count() as u64)
}

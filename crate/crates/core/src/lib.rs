//! Solutions of σ(a1·n + b1) = σ(a2·n + b2) and φ(a1·n + b1) = φ(a2·n + b2).
//!
//! * [`arith`]: sieves, factorization, primality, σ, φ, P, rad.
//! * [`equations`]: exhaustive search and counting of solutions n ≤ x.
//! * [`parametric`]: parametric families, their solutions, and the
//!   parametric/sporadic classifier.
//! * [`smoothness`]: exact smooth-number counters and leading-order bounds.
//! * [`audit`]: bucket assignment and decompositions of sporadic solutions.
//!
//! ```
//! use sigphi::{search, EquationSpec, FnKind};
//!
//! let spec = EquationSpec::new(FnKind::Phi, 1, 0, 1, 1).unwrap();
//! let ns: Vec<u64> = search(&spec, 500).unwrap().iter().map(|r| r.n).collect();
//! assert_eq!(ns, [1, 3, 15, 104, 164, 194, 255, 495]);
//! ```

pub mod arith;
pub mod audit;
pub mod equations;
pub mod error;
pub mod parametric;
pub mod smoothness;

pub use arith::{
    build_table, factorize, is_prime, largest_prime_factor, phi, radical, sigma,
    smallest_prime_factor, ArithTable, Factorization,
};
pub use audit::{
    assign_bucket, check_p_divisibility, default_params, AuditParams, Bucket, BucketVerdict,
    Decomposition,
};
pub use equations::{
    count_raw, count_sporadic, search, search_classified, search_range, Classification,
    EquationSpec, FnKind, SolutionRecord,
};
pub use error::{Error, Result};
pub use parametric::{
    classify, consecutive_multiperfect_search, derive_family, enumerate_families, generate,
    ghp_generate, verify_witness, Family, Verdict, Witness,
};
pub use smoothness::{
    bound_bfps, bound_debruijn, bound_main, count_s, is_in_s, phi_smooth_count, psi,
    sigma_smooth_count, Counter, SmoothReport, SmoothTable,
};

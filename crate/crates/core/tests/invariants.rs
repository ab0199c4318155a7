use proptest::prelude::*;
use sigphi::audit::{self, AuditParams, Bucket};
use sigphi::{
    classify, enumerate_families, generate, search, EquationSpec, Error, FnKind, Verdict,
};

fn kind() -> impl Strategy<Value = FnKind> {
    prop_oneof![Just(FnKind::Sigma), Just(FnKind::Phi)]
}

fn equation() -> impl Strategy<Value = EquationSpec> {
    (kind(), 1i64..4, -3i64..4, 1i64..4, -3i64..30)
        .prop_filter_map("degenerate", |(k, a1, b1, a2, b2)| {
            EquationSpec::new(k, a1, b1, a2, b2).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // Every generated witness solves its equation and classifies as parametric.
    #[test]
    fn witnesses_classify_parametric(spec in equation()) {
        for fam in enumerate_families(&spec, 40).iter().take(4) {
            for w in generate(fam, 300).unwrap().into_iter().take(5) {
                prop_assert!(spec.is_solution(w.n).unwrap());
                let verdict = classify(&spec, w.n).unwrap();
                prop_assert!(verdict.is_parametric());
            }
        }
    }

    // Parametric verdicts carry a witness that reproduces n.
    #[test]
    fn classify_witness_reproduces_n(spec in equation()) {
        for rec in search(&spec, 3000).unwrap() {
            if let Verdict::Parametric(w) = classify(&spec, rec.n).unwrap() {
                prop_assert_eq!(w.n, rec.n);
                prop_assert!(sigphi::verify_witness(&w));
            }
        }
    }

    // Bucket assignment is total for phi and single-valued with a coherent decomposition.
    #[test]
    fn phi_buckets_total(b2 in 1i64..12, y in 2.0f64..40.0) {
        let spec = EquationSpec::new(FnKind::Phi, 1, 0, 1, b2).unwrap();
        let params = AuditParams::with_overrides(20_000, y, y.sqrt()).unwrap();
        for row in audit::audit(&spec, &params).unwrap() {
            let v = &row.verdict;
            match (v.bucket, &v.decomposition) {
                (Bucket::B3 | Bucket::B4, Some(d)) => {
                    prop_assert!(d.reconstructs(&spec, row.n));
                    prop_assert!(d.divisor_identity(FnKind::Phi));
                    prop_assert_eq!(v.bucket == Bucket::B3, (d.m1 as f64) * (d.m2 as f64) <= params.split());
                    prop_assert!(audit::check_p_divisibility(&spec, v).unwrap());
                }
                (Bucket::B1 | Bucket::B2, None) => {}
                other => prop_assert!(false, "incoherent verdict {:?}", other),
            }
        }
    }
}

#[test]
fn sigma_audit_total_when_s_is_squarefull() {
    // y = 3 puts every n with a square factor p^2 >= 4 into S.
    let params = AuditParams::with_overrides(50_000, 3.0, 2.0).unwrap();
    for b2 in [1, 2, 22] {
        let spec = EquationSpec::new(FnKind::Sigma, 1, 0, 1, b2).unwrap();
        let rows = audit::audit(&spec, &params).unwrap();
        assert!(!rows.is_empty());
    }
}

#[test]
fn sigma_audit_can_lack_a_decomposition() {
    let spec = EquationSpec::new(FnKind::Sigma, 1, 0, 1, 1).unwrap();
    let params = AuditParams::with_overrides(300, 9.0, 3.0).unwrap();
    assert!(matches!(
        audit::audit(&spec, &params),
        Err(Error::Integrity(_))
    ));
}

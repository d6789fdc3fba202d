//! Differential relations at Fermat and nearby sections.

use tautsys::exact::{int, ratio, ExponentVector, Family, Scalar, SparsePoly};
use tautsys::griffiths::{
    derivative_query, filtration_generators, membership_test, scan_family, verify_certificate, verify_witness,
    MembershipCertificate, MembershipOutcome, MembershipQuery, ScanLine, SectionPoint, SolveMode,
};
use tautsys::model::{build_projective_model, BasisOrdering, ModelSpec};
use tautsys::periods::{closed_form_derivatives_at, fermat_derivative_check_p1};

fn model(d: usize) -> ModelSpec {
    build_projective_model(d, BasisOrdering::InteriorFirst).unwrap()
}

fn x_mono(exps: &[i64], c: Scalar) -> SparsePoly {
    SparsePoly::monomial(Family::X, ExponentVector(exps.to_vec()), c)
}

fn ints(v: &[i64]) -> Vec<Scalar> {
    v.iter().map(|&x| int(x)).collect()
}

#[test]
fn second_model_square_of_interior_monomial_is_member() {
    let spec = model(2);
    let fermat = SectionPoint::fermat(&spec);
    assert_eq!(fermat.coords(), ints(&[0, 0, 0, 1, 0, 0, 1, 0, 0, 1]).as_slice());
    let mut alpha = vec![0; spec.n()];
    alpha[0] = 2;
    let query = derivative_query(&spec, &alpha).unwrap();
    assert_eq!(query.poly(), &x_mono(&[2, 2, 2], int(1)));
    assert_eq!(query.k(), 2);
    for mode in [SolveMode::Full, SolveMode::DegreeClass] {
        let outcome = membership_test(&spec, &fermat, &query, mode).unwrap();
        let MembershipOutcome::Member(cert) = outcome else {
            panic!("expected a member");
        };
        assert!(verify_certificate(&spec, &fermat, &query, &cert));
    }
    // q0 = x1^2 x2^2 / 3 since q0 * 3 x0^2 = (x0 x1 x2)^2
    let printed = MembershipCertificate {
        q: vec![
            x_mono(&[0, 2, 2], ratio(1, 3)),
            SparsePoly::zero(Family::X, 3),
            SparsePoly::zero(Family::X, 3),
        ],
    };
    assert!(verify_certificate(&spec, &fermat, &query, &printed));
    let unnormalized = MembershipCertificate {
        q: vec![
            x_mono(&[0, 2, 2], int(1)),
            SparsePoly::zero(Family::X, 3),
            SparsePoly::zero(Family::X, 3),
        ],
    };
    assert!(!verify_certificate(&spec, &fermat, &query, &unnormalized));
}

#[test]
fn zero_certificate_for_zero_query() {
    let spec = model(2);
    let fermat = SectionPoint::fermat(&spec);
    let zero = MembershipQuery::new(&spec, SparsePoly::zero(Family::X, 3)).unwrap();
    assert!(verify_certificate(&spec, &fermat, &zero, &MembershipCertificate::zero(&spec)));
    assert!(membership_test(&spec, &fermat, &zero, SolveMode::Full).unwrap().is_member());
}

#[test]
fn fermat_membership_matches_closed_form_derivatives() {
    // x0 x1 <-> d/da0 and x0^2 <-> d/da1 for the first model.
    let spec = model(1);
    let fermat = SectionPoint::fermat(&spec);
    let check = fermat_derivative_check_p1();
    for (i, var) in ["a0", "a1", "a2"].iter().enumerate() {
        let mut alpha = vec![0; 3];
        alpha[i] = 1;
        let q = derivative_query(&spec, &alpha).unwrap();
        let member = membership_test(&spec, &fermat, &q, SolveMode::Full).unwrap().is_member();
        let vanishes = check.vanishes(var).unwrap();
        assert_eq!(member, vanishes, "{var}");
    }
    assert_eq!(check.vanishes("a0"), Some(true));
    assert_eq!(check.vanishes("a1"), Some(false));
}

#[test]
fn non_member_witness_replays() {
    let spec = model(1);
    let fermat = SectionPoint::fermat(&spec);
    let query = derivative_query(&spec, &[0, 1, 0]).unwrap();
    assert_eq!(query.poly(), &x_mono(&[2, 0], int(1)));
    for mode in [SolveMode::Full, SolveMode::DegreeClass] {
        match membership_test(&spec, &fermat, &query, mode).unwrap() {
            MembershipOutcome::NonMember(w) => {
                assert!(verify_witness(&spec, &fermat, &query, mode, &w).unwrap());
            }
            MembershipOutcome::Member(_) => panic!("x0^2 must not be a member"),
        }
    }
}

#[test]
fn non_member_matches_brute_force_over_linear_q() {
    // q0 = alpha x0 + beta x1, q1 = gamma x0 + delta x1 at the Fermat point:
    // sum d_i q_i + 2 x_i q_i = x0^2 needs 2 alpha = 1, beta + gamma = 0,
    // delta = 0 and alpha + delta = 0, which is inconsistent.
    let rows: [[i64; 4]; 4] = [[2, 0, 0, 0], [0, 1, 1, 0], [0, 0, 0, 1], [1, 0, 0, 1]];
    let rhs = [1, 0, 0, 0];
    // rows 0 and 3 force alpha = 1/2 and alpha = -delta = 0
    let alpha = ratio(rhs[0], rows[0][0]);
    let delta = ratio(rhs[2], rows[2][3]);
    assert_ne!(alpha.clone() + delta, int(rhs[3]));
}

#[test]
fn closed_form_cross_check_off_fermat() {
    let r = closed_form_derivatives_at(&ints(&[3, 1, 1])).unwrap();
    assert_eq!(r.vanishes("a0"), Some(false));
    assert!(closed_form_derivatives_at(&ints(&[2, 1, 1])).is_err());
}

#[test]
fn scan_through_fermat_point() {
    let spec = model(1);
    let query = derivative_query(&spec, &[1, 0, 0]).unwrap();
    let line = ScanLine {
        base: ints(&[0, 1, 1]),
        direction: ints(&[1, 0, 0]),
        params: ints(&[0, 1, 2]),
    };
    let samples = scan_family(&spec, &query, &line).unwrap();
    let verdicts: Vec<_> = samples.iter().map(|s| (s.t.as_str(), s.verdict)).collect();
    assert_eq!(verdicts, vec![("0/1", "member"), ("1/1", "non-member"), ("2/1", "non-member")]);
    assert_eq!(samples[2].point, vec!["2/1", "1/1", "1/1"]);
}

#[test]
fn scan_of_trivial_queries() {
    let spec = model(1);
    let line = ScanLine {
        base: ints(&[0, 1, 1]),
        direction: ints(&[1, 0, 0]),
        params: vec![int(0), ratio(1, 2), int(1), int(-3)],
    };
    let zero = MembershipQuery::new(&spec, SparsePoly::zero(Family::X, 2)).unwrap();
    assert!(scan_family(&spec, &zero, &line).unwrap().iter().all(|s| s.verdict == "member"));
    let one = MembershipQuery::new(&spec, x_mono(&[0, 0], int(1))).unwrap();
    assert_eq!(one.k(), 0);
    assert!(scan_family(&spec, &one, &line).unwrap().iter().all(|s| s.verdict == "non-member"));
    let flat = ScanLine {
        direction: ints(&[0, 0, 0]),
        ..line
    };
    assert!(scan_family(&spec, &zero, &flat).is_err());
}

#[test]
fn product_query_degree() {
    let spec = model(1);
    let q = derivative_query(&spec, &[0, 1, 1]).unwrap();
    assert_eq!(q.poly(), &x_mono(&[2, 2], int(1)));
    assert_eq!(q.alpha(), Some(&[0u32, 1, 1][..]));
    assert!(derivative_query(&spec, &[0, 0, 0]).is_err());
}

#[test]
fn filtration_examples() {
    let f = filtration_generators(&model(1), 2).unwrap();
    assert!(f.spanning);
    assert_eq!(f.expected, 3);
    let f = filtration_generators(&model(1), 3).unwrap();
    assert!(f.spanning);
    assert_eq!((f.rank, f.expected), (5, 5));
    let f = filtration_generators(&model(2), 3).unwrap();
    assert!(f.spanning);
    assert_eq!(f.expected, 28);
    for d in 1..=2 {
        for p in 1..=4 {
            assert!(filtration_generators(&model(d), p).unwrap().spanning);
        }
    }
}

#[test]
fn surjectivity_ranges() {
    for d in 1..=3 {
        let spec = model(d);
        for k in 1..=3 {
            for l in 1..=(4 - k) {
                let s = spec.multiplication_surjectivity(k, l).unwrap();
                assert!(
                    matches!(s, tautsys::model::Surjectivity::Surjective { .. }),
                    "d = {d}, k = {k}, l = {l}"
                );
            }
        }
    }
}

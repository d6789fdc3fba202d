//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero on failure.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use tautsys::exact::{binomial, int, ratio, ExponentVector, Family, Scalar, SparsePoly};
use tautsys::griffiths::{
    derivative_query, filtration_generators, membership_test, verify_certificate, verify_witness,
    MembershipCertificate, MembershipOutcome, SectionPoint, SolveMode,
};
use tautsys::model::{build_projective_model, BasisOrdering, ModelSpec};
use tautsys::periods::{
    closed_form_series_p1, derivative_generating_series, fermat_derivative_check_p1, period_series,
    verify_annihilation,
};
use tautsys::selftest::{equivalence_trial, rng_from_seed};
use tautsys::tautsys::{
    build_scalar_system, build_tautological_system, build_vector_system, compare_fourier_families,
    reference_scalar_system_p1, reference_scalar_system_p2, OperatorFamily,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn model(d: usize) -> ModelSpec {
    build_projective_model(d, BasisOrdering::InteriorFirst).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn x_mono(exps: &[i64], c: Scalar) -> SparsePoly {
    SparsePoly::monomial(Family::X, ExponentVector(exps.to_vec()), c)
}

fn member(spec: &ModelSpec, alpha: &[u32]) -> Result<(SectionPoint, MembershipCertificate), String> {
    let point = SectionPoint::fermat(spec);
    let query = derivative_query(spec, alpha).map_err(|e| e.to_string())?;
    match membership_test(spec, &point, &query, SolveMode::Full).map_err(|e| e.to_string())? {
        MembershipOutcome::Member(cert) => {
            ensure(verify_certificate(spec, &point, &query, &cert), "certificate fails the audit")?;
            Ok((point, cert))
        }
        MembershipOutcome::NonMember(_) => Err(format!("{} is not a member", query.poly())),
    }
}

fn series_against_closed_form() -> Outcome {
    let s = period_series(&model(1), 40);
    let c = closed_form_series_p1(20);
    ensure(s.poly() == c.poly(), "series differs from the closed form")?;
    for k in 0..=20u32 {
        let k64 = k as i64;
        let coeff = s.poly().coeff(&[-1 - 2 * k64, k64, k64]);
        ensure(coeff == Scalar::from_integer(binomial(2 * k, k)), format!("coefficient k = {k}"))?;
    }
    Ok("21 central binomial coefficients, k <= 20".into())
}

fn base_system_annihilation() -> Outcome {
    let spec = model(1);
    let sys = build_tautological_system(&spec, &spec.lattice_relations(2)).map_err(|e| e.to_string())?;
    ensure(sys.family(OperatorFamily::Toric).count() == 1, "one toric operator")?;
    ensure(sys.family(OperatorFamily::Symmetry).count() == 4, "four symmetry operators")?;
    ensure(sys.family(OperatorFamily::Euler).count() == 1, "one Euler operator")?;
    let r1 = verify_annihilation(&sys, &period_series(&spec, 20)).map_err(|e| e.to_string())?;
    ensure(r1.all_zero && r1.verified_order >= 18, format!("d=1 verified to {}", r1.verified_order))?;
    let spec = model(2);
    let sys = build_tautological_system(&spec, &spec.lattice_relations(3)).map_err(|e| e.to_string())?;
    let r2 = verify_annihilation(&sys, &period_series(&spec, 11)).map_err(|e| e.to_string())?;
    ensure(r2.all_zero && r2.verified_order >= 8, format!("d=2 verified to {}", r2.verified_order))?;
    Ok(format!(
        "d=1 zero to order {}, d=2 (D=3, {} operators) zero to order {}",
        r1.verified_order,
        sys.operators.len(),
        r2.verified_order
    ))
}

fn first_relation() -> Outcome {
    let spec = model(1);
    let (point, _) = member(&spec, &[1, 0, 0])?;
    let query = derivative_query(&spec, &[1, 0, 0]).unwrap();
    let printed = MembershipCertificate {
        q: vec![x_mono(&[0, 1], ratio(1, 2)), SparsePoly::zero(Family::X, 2)],
    };
    ensure(verify_certificate(&spec, &point, &query, &printed), "q0 = x1/2 fails")?;
    let check = fermat_derivative_check_p1();
    ensure(check.derivatives[0].prefactor_value == "0/1", "d/da0 prefactor is not 0")?;
    Ok("x0*x1 member, q0 = x1/2 verified, d/da0 prefactor 0 at (0,1,1)".into())
}

fn second_relation() -> Outcome {
    let spec = model(2);
    let mut alpha = vec![0; spec.n()];
    alpha[0] = 2;
    let (point, _) = member(&spec, &alpha)?;
    let query = derivative_query(&spec, &alpha).unwrap();
    let zero = SparsePoly::zero(Family::X, 3);
    let printed = MembershipCertificate {
        q: vec![x_mono(&[0, 2, 2], ratio(1, 3)), zero.clone(), zero],
    };
    ensure(verify_certificate(&spec, &point, &query, &printed), "q0 = x1^2 x2^2/3 fails")?;
    Ok("(x0 x1 x2)^2 member, q0 = x1^2*x2^2/3 verified".into())
}

fn non_membership_control() -> Outcome {
    let spec = model(1);
    let point = SectionPoint::fermat(&spec);
    let query = derivative_query(&spec, &[0, 1, 0]).unwrap();
    ensure(query.poly() == &x_mono(&[2, 0], int(1)), "query is not x0^2")?;
    let w = match membership_test(&spec, &point, &query, SolveMode::Full).map_err(|e| e.to_string())? {
        MembershipOutcome::NonMember(w) => w,
        MembershipOutcome::Member(_) => return Err("x0^2 reported as member".into()),
    };
    ensure(
        verify_witness(&spec, &point, &query, SolveMode::Full, &w).map_err(|e| e.to_string())?,
        "witness does not replay",
    )?;
    let check = fermat_derivative_check_p1();
    let prefactor = &check.derivatives[1].prefactor_value;
    ensure(check.vanishes("a1") == Some(false), "d/da1 prefactor vanishes")?;
    Ok(format!("x0^2 non-member with replayed witness, d/da1 prefactor {prefactor}"))
}

fn equivalence_suite() -> Outcome {
    let mut rng = rng_from_seed(2024);
    let mut failed = 0;
    for _ in 0..50 {
        if !equivalence_trial(&mut rng).passed() {
            failed += 1;
        }
    }
    ensure(failed == 0, format!("{failed} of 50 trials failed"))?;
    for d in 1..=2 {
        let spec = model(d);
        let rels = spec.lattice_relations(2);
        for p in 1..=2 {
            let v = build_vector_system(&spec, &rels, p).map_err(|e| e.to_string())?;
            ensure(v.derivation_consistent(), format!("derivation fails for d = {d}, p = {p}"))?;
        }
    }
    Ok("50 randomized trials; vector rows derive from the base system for d, p in {1,2}".into())
}

fn fourier_families() -> Outcome {
    let mut sizes = Vec::new();
    for d in 1..=3 {
        let spec = model(d);
        let rels = spec.lattice_relations(2);
        let sys = build_scalar_system(&spec, &rels, 1).map_err(|e| e.to_string())?;
        let cmp = compare_fourier_families(&spec, &rels, &sys.fourier()).map_err(|e| e.to_string())?;
        ensure(cmp.all_match, format!("mismatch for d = {d}"))?;
        sizes.push(sys.operators.len().to_string());
    }
    Ok(format!("six families match for d = 1, 2, 3 ({} operators)", sizes.join(", ")))
}

fn general_builder() -> Outcome {
    for d in 1..=2 {
        let spec = model(d);
        let rels = spec.lattice_relations(2);
        let p1 = build_scalar_system(&spec, &rels, 1).map_err(|e| e.to_string())?;
        ensure(
            p1.canonical_forms() == reference_scalar_system_p1(&spec, &rels).canonical_forms(),
            format!("p = 1 differs for d = {d}"),
        )?;
        let p2 = build_scalar_system(&spec, &rels, 2).map_err(|e| e.to_string())?;
        ensure(
            p2.canonical_forms() == reference_scalar_system_p2(&spec, &rels).canonical_forms(),
            format!("p = 2 differs for d = {d}"),
        )?;
    }
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    // residuals lose up to p + 1 orders, so start high enough to verify 10
    let base = period_series(&spec, 14);
    let mut orders = Vec::new();
    for p in 1..=3 {
        let sys = build_scalar_system(&spec, &rels, p).map_err(|e| e.to_string())?;
        let phi = derivative_generating_series(&base, p, 14).map_err(|e| e.to_string())?;
        let r = verify_annihilation(&sys, &phi).map_err(|e| e.to_string())?;
        ensure(r.all_zero, format!("nonzero residual for p = {p}"))?;
        ensure(r.verified_order >= 10, format!("p = {p} verified only to {}", r.verified_order))?;
        orders.push(r.verified_order.to_string());
    }
    Ok(format!(
        "matches hand-coded p = 1, 2 systems; p = 1, 2, 3 zero to orders {}",
        orders.join(", ")
    ))
}

fn surjectivity() -> Outcome {
    let mut maps = 0;
    for d in 1..=3 {
        let spec = model(d);
        for k in 1..=3u32 {
            for l in 1..=(4 - k) {
                let s = spec.multiplication_surjectivity(k, l).map_err(|e| e.to_string())?;
                ensure(s.is_surjective(), format!("d = {d}, k = {k}, l = {l} deficient"))?;
                maps += 1;
            }
        }
    }
    for d in 1..=2 {
        for p in 1..=4 {
            let f = filtration_generators(&model(d), p).map_err(|e| e.to_string())?;
            ensure(f.spanning, format!("filtration fails for d = {d}, p = {p}"))?;
        }
    }
    Ok(format!("{maps} multiplication maps surjective; filtration generated for p <= 4, d <= 2"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 period series equals closed form", 1, series_against_closed_form),
        ("2 base system annihilates the period", 30, base_system_annihilation),
        ("3 first differential relation", 1, first_relation),
        ("4 second differential relation", 5, second_relation),
        ("5 non-membership control", 1, non_membership_control),
        ("6 vector/scalar equivalence", 30, equivalence_suite),
        ("7 Fourier generator families", 1, fourier_families),
        ("8 general-order builder", 60, general_builder),
        ("9 surjectivity and filtration", 60, surjectivity),
    ];
    let mut all = true;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = elapsed < Duration::from_secs(limit);
        let ok = outcome.is_ok() && in_time;
        all &= ok;
        let detail = match outcome {
            Ok(s) => s,
            Err(s) => format!("failed: {s}"),
        };
        println!(
            "{} {name}: {detail} [exact; {:.3} s, limit {limit} s{}]",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", over time" }
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

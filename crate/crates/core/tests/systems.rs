//! Construction of the scalar, vector and transformed systems.

use tautsys::exact::{int, Family, SparsePoly};
use tautsys::model::{build_projective_model, BasisOrdering, ModelSpec};
use tautsys::series::LaurentSeries;
use tautsys::periods::{derivative_generating_series, period_series, verify_annihilation};
use tautsys::tautsys::{
    build_scalar_system, build_tautological_system, build_vector_system, compare_fourier_families,
    reference_scalar_system_p1, reference_scalar_system_p2, scalarize, vectorize, OperatorFamily, SystemKind,
    VectorSolution,
};
use tautsys::weyl::Space;

fn model(d: usize) -> ModelSpec {
    build_projective_model(d, BasisOrdering::InteriorFirst).unwrap()
}

#[test]
fn scalar_builder_matches_hand_coded_systems() {
    for d in 1..=2 {
        for ordering in [BasisOrdering::InteriorFirst, BasisOrdering::GradedLex] {
            let spec = build_projective_model(d, ordering).unwrap();
            let rels = spec.lattice_relations(2);
            let p1 = build_scalar_system(&spec, &rels, 1).unwrap();
            assert_eq!(p1.canonical_forms(), reference_scalar_system_p1(&spec, &rels).canonical_forms());
            let p2 = build_scalar_system(&spec, &rels, 2).unwrap();
            assert_eq!(p2.canonical_forms(), reference_scalar_system_p2(&spec, &rels).canonical_forms());
        }
    }
}

#[test]
fn scalar_system_family_counts_p1_d1() {
    let spec = model(1);
    let sys = build_scalar_system(&spec, &spec.lattice_relations(2), 1).unwrap();
    assert_eq!(sys.kind, SystemKind::Scalar(1));
    assert_eq!(sys.family(OperatorFamily::Toric).count(), 1);
    assert_eq!(sys.family(OperatorFamily::Symmetry).count(), 4);
    assert_eq!(sys.family(OperatorFamily::Euler).count(), 1);
    assert_eq!(sys.family(OperatorFamily::BEuler).count(), 1);
    // d b_i d b_j over unordered pairs of three indices
    assert_eq!(sys.family(OperatorFamily::BAnnihilator).count(), 6);
    // d a_i d b_j - d a_j d b_i over unordered pairs
    assert_eq!(sys.family(OperatorFamily::Exchange).count(), 3);
}

#[test]
fn scalar_system_euler_constants() {
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    for p in 1..=3u32 {
        let sys = build_scalar_system(&spec, &rels, p).unwrap();
        let euler = &sys.family(OperatorFamily::Euler).next().unwrap().op;
        assert_eq!(euler.to_string(), format!("a0*da0 + a1*da1 + a2*da2 + {}", 1 + p));
        let b_euler = &sys.family(OperatorFamily::BEuler).next().unwrap().op;
        assert_eq!(b_euler.to_string(), format!("b0*db0 + b1*db1 + b2*db2 - {p}"));
    }
}

#[test]
fn scalar_systems_annihilate_on_second_model() {
    let spec = model(2);
    let rels = spec.lattice_relations(2);
    let base = period_series(&spec, 7);
    for p in 1..=2 {
        let sys = build_scalar_system(&spec, &rels, p).unwrap();
        let phi = derivative_generating_series(&base, p, 7).unwrap();
        let report = verify_annihilation(&sys, &phi).unwrap();
        assert!(report.all_zero, "p = {p}");
        assert!(report.verified_order >= 4);
    }
}

#[test]
fn perturbed_generating_series_is_detected() {
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    let base = period_series(&spec, 10);
    let sys = build_scalar_system(&spec, &rels, 1).unwrap();
    let phi = derivative_generating_series(&base, 1, 10).unwrap();
    let mut e = vec![0i64; 6];
    e[0] = -3;
    e[2] = 1;
    e[3] = 1;
    let bump = SparsePoly::from_terms(Family::AB, 6, vec![(e, int(1))]).unwrap();
    let bump = LaurentSeries::new(bump, 0, phi.truncation(), phi.shift()).unwrap();
    let bumped = phi.add(&bump).unwrap();
    assert!(!verify_annihilation(&sys, &bumped).unwrap().all_zero);
}

#[test]
fn vector_systems_are_derivation_consistent() {
    for d in 1..=2 {
        let spec = model(d);
        let rels = spec.lattice_relations(2);
        for p in 1..=2 {
            let v = build_vector_system(&spec, &rels, p).unwrap();
            assert!(v.derivation_consistent(), "d = {d}, p = {p}");
            assert!(!v.equations.is_empty());
        }
    }
    assert!(build_vector_system(&model(1), &model(1).lattice_relations(2), 3).is_err());
}

#[test]
fn vector_solution_satisfies_vector_system() {
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    let base = period_series(&spec, 12);
    for p in 1..=2 {
        let sys = build_vector_system(&spec, &rels, p).unwrap();
        let v = VectorSolution::from_derivatives(&base, p).unwrap();
        for eq in &sys.equations {
            let r = eq.residual(&v).unwrap();
            assert!(r.is_zero(), "p = {p}, {}", eq.label);
        }
        let s = scalarize(&v).unwrap();
        let back = vectorize(&s, p).unwrap();
        assert_eq!(back, v);
    }
}

#[test]
fn specializing_b_recovers_directional_derivative() {
    // Setting b = e_i in the p = 1 generating series gives d_i Pi. The
    // specialized series carries its own index, without the derivative shift.
    let spec = model(1);
    let base = period_series(&spec, 10);
    let phi = derivative_generating_series(&base, 1, 10).unwrap();
    for i in 0..spec.n() {
        let mut e = vec![0i64; spec.n()];
        e[i] = 1;
        let coeff = phi.b_coefficient(&e).unwrap();
        let direct = base.derivative_a(i).unwrap();
        assert!(coeff.agrees_up_to(&direct, 10));
        let point: Vec<_> = e.iter().map(|&x| int(x)).collect();
        let specialized = phi.specialize_b(&point).unwrap();
        assert!(specialized.truncation() >= 8);
        assert_eq!(specialized.truncated(8).poly(), direct.truncated(8 + direct.shift()).poly());
    }
}

#[test]
fn vectorize_rejects_inhomogeneous_input() {
    let spec = model(1);
    let base = period_series(&spec, 6);
    let phi1 = derivative_generating_series(&base, 1, 6).unwrap();
    let phi2 = derivative_generating_series(&base, 2, 6).unwrap();
    let mixed = phi1.add(&phi2).unwrap();
    assert!(vectorize(&mixed, 1).is_err());
    assert!(vectorize(&phi1, 2).is_err());
}

#[test]
fn fourier_transform_matches_reference_families() {
    for d in 1..=3 {
        let spec = model(d);
        let rels = spec.lattice_relations(2);
        let sys = build_scalar_system(&spec, &rels, 1).unwrap();
        let dual = sys.fourier();
        assert_eq!(dual.space(), Space::Dual);
        let cmp = compare_fourier_families(&spec, &rels, &dual).unwrap();
        assert!(cmp.all_match, "d = {d}: {cmp:#?}");
        assert!(cmp.identities_hold);
    }
}

#[test]
fn fourier_comparison_rejects_untransformed_or_higher_systems() {
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    let primal = build_scalar_system(&spec, &rels, 1).unwrap();
    assert!(compare_fourier_families(&spec, &rels, &primal).is_err());
    let p2 = build_scalar_system(&spec, &rels, 2).unwrap().fourier();
    assert!(compare_fourier_families(&spec, &rels, &p2).is_err());
}

#[test]
fn fourier_comparison_detects_a_dropped_operator() {
    let spec = model(1);
    let rels = spec.lattice_relations(2);
    let mut dual = build_scalar_system(&spec, &rels, 1).unwrap().fourier();
    let idx = dual
        .operators
        .iter()
        .position(|o| o.family == OperatorFamily::Exchange)
        .unwrap();
    dual.operators.remove(idx);
    assert!(!compare_fourier_families(&spec, &rels, &dual).unwrap().all_match);
}

#[test]
fn fourier_twice_reflects() {
    let spec = model(2);
    let sys = build_scalar_system(&spec, &spec.lattice_relations(2), 1).unwrap();
    let twice = sys.fourier().fourier();
    for (a, b) in sys.operators.iter().zip(&twice.operators) {
        assert_eq!(a.op.reflect(), b.op);
    }
}

#[test]
fn base_system_rejects_bad_relations() {
    let spec = model(1);
    assert!(build_tautological_system(&spec, &[]).is_err());
    let other = model(2).lattice_relations(2);
    assert!(build_tautological_system(&spec, &other).is_err());
}

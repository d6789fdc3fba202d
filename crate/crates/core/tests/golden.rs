//! Byte-stable serialized records. Set `TAUTSYS_BLESS=1` to rewrite them.

use std::path::PathBuf;

use serde::Serialize;
use tautsys::model::{build_projective_model, BasisOrdering};
use tautsys::tautsys::build_scalar_system;

fn check<T: Serialize>(name: &str, value: &T) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    let text = serde_json::to_string_pretty(value).unwrap() + "\n";
    if std::env::var_os("TAUTSYS_BLESS").is_some() {
        std::fs::write(&path, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    assert_eq!(text, expected, "{name} differs from its golden copy");
}

#[test]
fn first_model_record() {
    check("model_d1.json", &build_projective_model(1, BasisOrdering::InteriorFirst).unwrap().to_record());
}

#[test]
fn second_model_record() {
    check("model_d2.json", &build_projective_model(2, BasisOrdering::InteriorFirst).unwrap().to_record());
}

#[test]
fn first_derivative_system_record() {
    let spec = build_projective_model(1, BasisOrdering::InteriorFirst).unwrap();
    let sys = build_scalar_system(&spec, &spec.lattice_relations(2), 1).unwrap();
    check("scalar_p1_d1.json", &sys.to_record());
}

#[test]
fn transformed_system_record() {
    let spec = build_projective_model(1, BasisOrdering::InteriorFirst).unwrap();
    let sys = build_scalar_system(&spec, &spec.lattice_relations(2), 1).unwrap();
    check("fourier_p1_d1.json", &sys.fourier().to_record());
}

mod common;

use common::{a8, e7};
use okapain_core::atlas::{
    instantiate_twist, load_atlas, local_divisor_equation, okamoto_painleve_check, render,
    verify_transitions, AtlasError, Expr,
};
use okapain_core::cas::{Poly, Var};

#[test]
fn shipped_atlases_load() {
    let e = e7();
    assert_eq!(e.charts.len(), 16);
    assert_eq!(e.rank(), 8);
    assert_eq!(e.multiplicities(), vec![1, 2, 3, 4, 2, 3, 2, 1]);
    let a = a8();
    assert_eq!(a.charts.len(), 15);
    assert_eq!(a.rank(), 9);
    assert_eq!(a.multiplicities(), vec![1; 9]);
}

#[test]
fn shipped_atlases_verify() {
    for atlas in [e7(), a8()] {
        let r = verify_transitions(&atlas).unwrap();
        assert!(r.is_pass(), "{r}");
        assert!(r.checked > 20);
        let r = okamoto_painleve_check(&atlas);
        assert!(r.is_pass(), "{r}");
    }
}

#[test]
fn render_round_trip() {
    for atlas in [e7(), a8()] {
        let text = render(&atlas);
        assert_eq!(load_atlas(&text).unwrap(), atlas);
    }
}

#[test]
fn local_divisor_equations() {
    let e = e7();
    let x5 = Poly::var(Var::new("x5"));
    let y5 = Poly::var(Var::new("y5"));
    assert_eq!(local_divisor_equation(&e, "U5"), &x5 * &y5);
    assert_eq!(local_divisor_equation(&e, "U14"), Poly::one());
    assert_eq!(local_divisor_equation(&a8(), "U9"), Poly::var(Var::new("y9")));
}

#[test]
fn twist_instantiation() {
    let a = instantiate_twist(&a8(), 1).unwrap();
    let th = a.theta_for("Y2").find(|e| e.chart == "U9").unwrap();
    assert_eq!(th.field.render(), "-1/y9 d/dx9");
    let a = instantiate_twist(&a8(), 3).unwrap();
    let th = a.theta_for("Y1").find(|e| e.chart == "U0").unwrap();
    assert_eq!(th.field.render(), "y0/(x0^3*y0^3) d/dy0");
    assert!(!a.has_twist_symbol());

    let e = e7();
    assert_eq!(instantiate_twist(&e, 1).unwrap().generators, e.generators);
    assert!(matches!(
        instantiate_twist(&e, 2),
        Err(AtlasError::UnsupportedTwist { .. })
    ));
    assert!(matches!(
        instantiate_twist(&a8(), 0),
        Err(AtlasError::NegativeExponentAfterInstantiation { .. })
    ));
}

#[test]
fn dangling_chart_reference() {
    let text = std::fs::read_to_string(common::data_path("e7.atlas")).unwrap();
    let bad = text.replace("U2 -> U1:", "U99 -> U1:");
    match load_atlas(&bad) {
        Err(AtlasError::UnknownReference { name, .. }) => assert_eq!(name, "U99"),
        other => panic!("expected UnknownReference, got {other:?}"),
    }
}

#[test]
fn parse_error_has_position() {
    let text = std::fs::read_to_string(common::data_path("a8.atlas")).unwrap();
    let bad = text.replace("y0 = 1/x1", "y0 = 1/*x1");
    match load_atlas(&bad) {
        Err(AtlasError::Parse { line, column, .. }) => {
            assert!(line > 20);
            assert!(column > 20);
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn perturbed_transition_is_localized() {
    let mut e = e7();
    let t = e
        .transitions
        .iter_mut()
        .find(|t| t.source == "U6" && t.target == "U5")
        .unwrap();
    t.formulas[0] = Expr::parse("x6*y6^2").unwrap();
    let r = verify_transitions(&e).unwrap();
    assert!(!r.is_pass());
    let global: Vec<&str> = r
        .failures
        .iter()
        .filter(|f| f.check == "global agreement")
        .map(|f| f.location.as_str())
        .collect();
    assert_eq!(global, vec!["U6 -> U5"]);
    for f in &r.failures {
        assert!(f.location.contains("U6") && f.location.contains("U5"), "{f:?}");
    }
}

#[test]
fn wrong_multiplicity_is_localized() {
    let mut e = e7();
    e.components[3].multiplicity = 3;
    let r = okamoto_painleve_check(&e);
    assert!(!r.is_pass());
    let f = r
        .failures
        .iter()
        .find(|f| f.check == "multiplicities span the kernel")
        .unwrap();
    assert_eq!(f.location, "Y4");
    assert!(r.failures.iter().any(|f| f.check == "Y.Y_i = 0" && f.location == "Y4"));
}

mod common;

use okapain_core::atlas::{Expr, Surface};
use okapain_core::cas::RF;
use okapain_core::sheaf::*;

fn rf(s: &str) -> RF {
    Expr::parse(s).unwrap().to_rf().unwrap()
}

fn field(s: &Surface, chart: &str, a: &str, b: &str) -> VectorField {
    VectorField {
        chart: s.chart_index(chart).unwrap(),
        a: rf(a),
        b: rf(b),
    }
}

#[test]
fn pushforward_of_d_dy1_to_u3() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let v = field(&s, "U1", "0", "1");
    let w = pushforward(&s, &v, s.chart_index("U3").unwrap()).unwrap();
    assert_eq!(w.a, rf("-x3^2"));
    assert_eq!(w.b, rf("x3*y3"));
}

#[test]
fn pushforward_is_functorial() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let (u1, u2, u3) = (
        s.chart_index("U1").unwrap(),
        s.chart_index("U2").unwrap(),
        s.chart_index("U3").unwrap(),
    );
    let v = field(&s, "U1", "(y1 - a1)/x1", "x1^2*y1 + t");
    let via = pushforward(&s, &pushforward(&s, &v, u2).unwrap(), u3).unwrap();
    let direct = pushforward(&s, &v, u3).unwrap();
    assert_eq!(via, direct);
    let back = pushforward(&s, &direct, u1).unwrap();
    assert_eq!(back, v);
}

#[test]
fn every_theta_is_a_twisted_log_section() {
    let cases = [(common::e7(), 1u32), (common::a8(), 1), (common::a8(), 2), (common::a8(), 3)];
    for (atlas, n) in cases {
        let s = Surface::new(&atlas, n).unwrap();
        for i in 0..s.components.len() {
            let sec = theta_section(&s, i).unwrap();
            let r = check_twisted_membership(&s, &sec);
            assert!(r.is_pass(), "{} n={} {}: {}", atlas.name, n, s.components[i].id, r);
        }
    }
}

#[test]
fn extra_pole_fails_membership_on_its_chart() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y1 = s.component_index("Y1").unwrap();
    let mut sec = theta_section(&s, y1).unwrap();
    let u1 = s.chart_index("U1").unwrap();
    sec.values.insert(u1, field(&s, "U1", "0", "(-a1 + y1)/x1^2"));
    let r = check_twisted_membership(&s, &sec);
    assert!(!r.is_pass());
    assert!(r.failures.iter().all(|f| f.location == "U1"), "{r}");
    assert_eq!(r.failures[0].check, "pole order within twist");
}

#[test]
fn a8_theta_with_localized_chart_is_log_at_n2() {
    let s = Surface::new(&common::a8(), 2).unwrap();
    let y2 = s.component_index("Y2").unwrap();
    let sec = theta_section(&s, y2).unwrap();
    let u9 = s.chart_index("U9").unwrap();
    assert!(sec.values.contains_key(&u9));
    // (x9 (t + x9) y9)^2 clears the U9 value by hand: -(t + x9) x9^2 d/dx9
    let v = sec.value(u9);
    let cleared = v.a.mul_poly(&rf("(x9*(t + x9)*y9)^2").as_poly().unwrap().clone());
    assert_eq!(cleared, rf("-(t + x9)*x9^2"));
    assert!(check_twisted_membership(&s, &sec).is_pass());
}

#[test]
fn theta_glues_on_every_component() {
    let cases = [(common::e7(), 1u32), (common::a8(), 1), (common::a8(), 2), (common::a8(), 3)];
    for (atlas, n) in cases {
        let s = Surface::new(&atlas, n).unwrap();
        for i in 0..s.components.len() {
            let r = cocycle_check_theta(&s, i).unwrap();
            assert!(r.is_pass(), "{} n={} {}: {}", atlas.name, n, s.components[i].id, r);
        }
    }
}

#[test]
fn flipped_sign_breaks_exactly_the_touched_overlaps() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y4 = s.component_index("Y4").unwrap();
    let mut sec = theta_section(&s, y4).unwrap();
    let u5 = s.chart_index("U5").unwrap();
    let v = sec.value(u5).scale(&RF::int(-1));
    sec.values.insert(u5, v);
    let r = cocycle_check_theta_section(&s, y4, &sec);
    assert!(!r.is_pass());
    for f in &r.failures {
        assert!(f.location.split('-').any(|c| c == "U5"), "{}", f.location);
    }
    let glued = cocycle_check_theta(&s, y4).unwrap();
    assert!(glued.is_pass());
}

#[test]
fn theta2_restricts_to_its_table_values() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y2 = s.component_index("Y2").unwrap();
    let sec = theta_section(&s, y2).unwrap();
    let along = restrict_to_component(&s, &sec, y2, BundleTag::TangentTwisted).unwrap();
    let u3 = s.chart_index("U3").unwrap();
    let u4 = s.chart_index("U4").unwrap();
    // 1/x3 d/dy3 framed by f3 = x3*y3, and -1/y4 d/dx4 framed by f4 = x4*y4
    assert_eq!(along.values[&Site::Chart(u3)].to_rational(), rf("y3"));
    assert_eq!(along.values[&Site::Chart(u4)].to_rational(), rf("-x4"));
    let normal = restrict_to_component(&s, &sec, y2, BundleTag::NormalTwisted).unwrap();
    assert!(normal.is_zero());
}

#[test]
fn lower_twist_sections_restrict_to_zero() {
    let s1 = Surface::new(&common::a8(), 1).unwrap();
    let s2 = Surface::new(&common::a8(), 2).unwrap();
    for i in 0..s1.components.len() {
        let mut sec = theta_section(&s1, i).unwrap();
        sec.twist = 2;
        for tag in [BundleTag::TangentTwisted, BundleTag::NormalTwisted] {
            let r = restrict_to_component(&s2, &sec, i, tag).unwrap();
            assert!(r.is_zero(), "{} {:?}", s2.components[i].id, tag);
        }
    }
}

#[test]
fn restricted_units_of_localized_charts() {
    let s = Surface::new(&common::a8(), 1).unwrap();
    let y2 = s.component_index("Y2").unwrap();
    let u9 = s.chart_index("U9").unwrap();
    let u1 = s.chart_index("U1").unwrap();
    assert_eq!(restricted_units(&s, y2, u9), vec![rf("t + x9").as_poly().unwrap().clone()]);
    assert!(restricted_units(&s, y2, u1).is_empty());
}

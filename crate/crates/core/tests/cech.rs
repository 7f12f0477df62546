mod common;

use okapain_core::atlas::{Atlas, Expr, Surface};
use okapain_core::cas::{q, Var, RF};
use okapain_core::cech::*;
use std::collections::BTreeMap;

fn rf(s: &str) -> RF {
    Expr::parse(s).unwrap().to_rf().unwrap()
}

fn cfg() -> SolverConfig {
    SolverConfig::default()
}

fn support(s: &Surface, c0: &Cochain0) -> Vec<String> {
    c0.values
        .iter()
        .filter(|(_, v)| !v.is_zero())
        .map(|(k, _)| s.chart(*k).id.clone())
        .collect()
}

fn comp(s: &Surface, id: &str) -> usize {
    s.component_index(id).unwrap()
}

fn chart(s: &Surface, id: &str) -> usize {
    s.chart_index(id).unwrap()
}

/// (-t)^e as a rational function, e may be negative.
fn minus_t_pow(e: i32) -> RF {
    RF::var(Var::new("t")).scale(&q(-1)).powi(e).unwrap()
}

/// The shipped intersection matrix with the A8 deformation at (2,3) and (3,2).
fn expected(atlas: &Atlas, n: u32) -> Vec<Vec<RF>> {
    let mut m: Vec<Vec<RF>> = atlas
        .intersection
        .iter()
        .map(|r| r.iter().map(|&x| RF::int(x)).collect())
        .collect();
    if atlas.name == "a8" {
        m[1][2] = minus_t_pow(-(n as i32));
        m[2][1] = minus_t_pow(n as i32);
    }
    m
}

#[test]
fn lifts_live_on_their_table_charts() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    assert_eq!(support(&s, &lift(&s, comp(&s, "Y1")).unwrap()), ["U1", "U2", "U3"]);
    let s = Surface::new(&common::a8(), 2).unwrap();
    assert_eq!(support(&s, &lift(&s, comp(&s, "Y1")).unwrap()), ["U0", "U1"]);
}

#[test]
fn theta_without_entries_lifts_to_zero() {
    let mut atlas = common::e7();
    atlas.generators.theta.retain(|e| e.component != "Y5");
    let s = Surface::new(&atlas, 1).unwrap();
    let c0 = lift(&s, comp(&s, "Y5")).unwrap();
    assert!(c0.is_zero());
}

#[test]
fn coboundary_of_theta1_and_theta2_on_y2() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y2 = comp(&s, "Y2");
    let (u3, u4) = (chart(&s, "U3"), chart(&s, "U4"));
    let c = coboundary_restricted(&s, &lift(&s, comp(&s, "Y1")).unwrap(), y2).unwrap();
    assert_eq!(c.values, vec![((u3, u4), rf("1/x4"))]);
    let c = coboundary_restricted(&s, &lift(&s, y2).unwrap(), y2).unwrap();
    assert_eq!(c.values, vec![((u3, u4), rf("-2/x4"))]);
    let eta = eta_cochain(&s, y2).unwrap();
    assert_eq!(eta.values, vec![((u3, u4), rf("1/x4"))]);
}

#[test]
fn coboundary_away_from_support_is_zero() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let c0 = lift(&s, comp(&s, "Y1")).unwrap();
    let c = coboundary_restricted(&s, &c0, comp(&s, "Y5")).unwrap();
    assert!(c.is_zero());
}

#[test]
fn theta1_on_y1_reduces_with_the_hand_witness() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y1 = comp(&s, "Y1");
    let c1 = coboundary_restricted(&s, &lift(&s, y1).unwrap(), y1).unwrap();
    let eta = eta_cochain(&s, y1).unwrap();
    let found = extract_class(&s, &c1, &eta, &cfg()).unwrap();
    assert_eq!(found.lambda, RF::int(-2));

    // tau = {-d/dx1, -d/dx2, a1 d/dy3} read as normal data along Y1
    let tau = BTreeMap::from([
        (chart(&s, "U1"), rf("-1")),
        (chart(&s, "U2"), rf("-1")),
        (chart(&s, "U3"), rf("a1")),
    ]);
    let d = coboundary_of(&s, y1, &tau).unwrap();
    assert_eq!(d.add(&eta.scale(&RF::int(-2))), c1);
}

#[test]
fn a8_theta3_on_y2_has_coefficient_minus_t_to_minus_n() {
    for n in 1..=4 {
        let s = Surface::new(&common::a8(), n).unwrap();
        let y2 = comp(&s, "Y2");
        let c1 = coboundary_restricted(&s, &lift(&s, comp(&s, "Y3")).unwrap(), y2).unwrap();
        let eta = eta_cochain(&s, y2).unwrap();
        let found = extract_class(&s, &c1, &eta, &cfg()).unwrap();
        assert_eq!(found.lambda, minus_t_pow(-(n as i32)), "n = {n}");
    }
}

#[test]
fn eta_extracts_to_itself() {
    for (atlas, n) in [(common::e7(), 1), (common::a8(), 2)] {
        let s = Surface::new(&atlas, n).unwrap();
        for i in 0..s.components.len() {
            let eta = eta_cochain(&s, i).unwrap();
            let found = extract_class(&s, &eta, &eta, &cfg()).unwrap();
            assert_eq!(found.lambda, RF::one());
            assert!(found.witness.values().all(|w| w.is_zero()));
        }
    }
}

#[test]
fn eta_is_not_a_coboundary() {
    let small = SolverConfig { cap: 8 };
    for (atlas, n) in [(common::e7(), 1), (common::a8(), 1)] {
        let s = Surface::new(&atlas, n).unwrap();
        for i in 0..s.components.len() {
            let eta = eta_cochain(&s, i).unwrap();
            match solve_coboundary(&s, &eta, &small) {
                Err(CechError::NoSolution { component, bound }) => {
                    assert_eq!(component, s.components[i].id);
                    assert_eq!(bound, 8);
                }
                other => panic!("{}: {:?}", s.components[i].id, other),
            }
        }
    }
}

#[test]
fn default_cap_also_finds_no_solution() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y4 = comp(&s, "Y4");
    let eta = eta_cochain(&s, y4).unwrap();
    let r = solve_coboundary(&s, &eta, &cfg());
    assert!(matches!(r, Err(CechError::NoSolution { bound: 64, .. })), "{r:?}");
}

#[test]
fn zero_eta_leaves_lambda_undetermined() {
    let s = Surface::new(&common::e7(), 1).unwrap();
    let y1 = comp(&s, "Y1");
    let c1 = coboundary_restricted(&s, &lift(&s, comp(&s, "Y2")).unwrap(), y1).unwrap();
    let zero = eta_cochain(&s, y1).unwrap().scale(&RF::zero());
    let tau = BTreeMap::from([(chart(&s, "U1"), rf("x1^2 + 3"))]);
    let exact = coboundary_of(&s, y1, &tau).unwrap();
    assert!(matches!(
        extract_class(&s, &exact, &zero, &cfg()),
        Err(CechError::NonUniqueLambda { .. })
    ));
    // theta2 along Y1 is eta1 itself, so with eta replaced by zero nothing solves it
    assert!(matches!(
        extract_class(&s, &c1, &zero, &SolverConfig { cap: 8 }),
        Err(CechError::NoSolution { .. })
    ));
}

#[test]
fn e7_delta_is_the_intersection_matrix() {
    let atlas = common::e7();
    let d = assemble_delta(&atlas, 1, &cfg()).unwrap();
    assert_eq!(d.entries, expected(&atlas, 1));
    assert_eq!(d.type_label, "E7~");
    let m: Vec<RF> = atlas.multiplicities().iter().map(|&x| RF::int(x as i64)).collect();
    let prod = okapain_core::linalg::mat_vec(&d.entries, &m);
    assert!(prod.iter().all(|x| x.is_zero()));
}

#[test]
fn a8_delta_is_the_deformed_cycle() {
    let atlas = common::a8();
    for n in 1..=3 {
        let d = assemble_delta(&atlas, n, &cfg()).unwrap();
        assert_eq!(d.entries, expected(&atlas, n), "n = {n}");
        assert_eq!(d.twist, n);
    }
}

#[test]
fn kernel_reports() {
    let d = assemble_delta(&common::e7(), 1, &cfg()).unwrap();
    let k = kernel_report(&d.entries).unwrap();
    assert_eq!((k.rank, k.kernel_dimension), (7, 1));
    assert!(k.determinant.is_zero());
    let want: Vec<RF> = [1, 2, 3, 4, 2, 3, 2, 1].iter().map(|&x| RF::int(x)).collect();
    assert_eq!(k.kernel_basis, vec![want]);

    let d = assemble_delta(&common::a8(), 2, &cfg()).unwrap();
    let k = kernel_report(&d.entries).unwrap();
    assert_eq!((k.rank, k.kernel_dimension), (9, 0));
    assert_eq!(k.determinant, rf("((-t)^2 - 1)^2/(-t)^2"));
    assert_eq!(k.specializations.len(), 3);

    let zero = vec![vec![RF::zero(); 2]; 2];
    let k = kernel_report(&zero).unwrap();
    assert_eq!((k.rank, k.kernel_dimension), (0, 2));
    assert!(k.determinant.is_zero());
}

#[test]
fn closed_form_determinant() {
    let d = expected_a8_determinant(2);
    let at = std::collections::HashMap::from([(Var::new("t"), q(2))]);
    assert_eq!(d.evaluate(&at).unwrap(), okapain_core::cas::q_frac(9, 4));
}

#[test]
fn vanishing_scan_to_five() {
    let r = vanishing_scan(&common::a8(), 5, &cfg()).unwrap();
    assert_eq!(r.rows.len(), 5);
    assert!(r.all_match(), "{r}");
    assert!(r.rows.iter().all(|row| row.kernel_dimension == 0));
    // n = 1: only t = -1 solves (-t) = 1, and the kernel opens up there
    assert_eq!(r.rows[0].rational_locus, vec![(q(-1), 8)]);
    assert_eq!(r.rows[1].rational_locus, vec![(q(-1), 8), (q(1), 8)]);
    let text = r.to_string();
    assert!(text.contains("H^0 vanishes for all tested n"));
}

#[test]
fn scan_rejects_additive_atlas() {
    let r = vanishing_scan(&common::e7(), 2, &cfg());
    assert!(matches!(r, Err(CechError::UnsupportedAtlasClass { .. })));
}

#[test]
fn printed_theta5_typo_is_caught_as_tangential_residue() {
    let atlas = common::patched("a8.atlas", "theta Y5 @ U4: (1 - y4)^n", "theta Y5 @ U4: (1 - x4)^n");
    let err = assemble_delta(&atlas, 1, &cfg()).unwrap_err();
    match err {
        CechError::Entry { row, col, source } => {
            assert_eq!((row, col), (5, 5));
            assert!(matches!(*source, CechError::TangentialResidue { .. }), "{source}");
        }
        other => panic!("{other}"),
    }
}

#[test]
fn bad_theta_is_a_membership_violation() {
    let atlas = common::patched("e7.atlas", "theta Y1 @ U1: (-a1 + y1)/x1", "theta Y1 @ U1: (-a1 + y1)/x1^2");
    let err = assemble_delta(&atlas, 1, &cfg()).unwrap_err();
    let text = err.to_string();
    assert!(text.contains("(1, 1)"), "{text}");
    match err {
        CechError::Entry { source, .. } => {
            assert!(matches!(*source, CechError::MembershipViolation { .. }))
        }
        other => panic!("{other}"),
    }
}

#[test]
fn serializations_name_labels_and_kernel() {
    let d = assemble_delta(&common::a8(), 1, &cfg()).unwrap();
    let k = kernel_report(&d.entries).unwrap();
    let doc = d.to_structured(&k);
    assert!(doc.starts_with("delta-matrix\natlas = a8\ntype = A8~\ntwist = 1\nsize = 9 x 9\n"));
    assert!(doc.contains("Y2: 1 ; -2 ; -1/t ; 0"));
    assert!(doc.contains("rank = 9\n"));
    let text = d.to_text(&k);
    assert!(text.lines().count() > 10);
}

#[test]
fn goldens_match() {
    for (atlas, n, file) in [
        (common::e7(), 1, "e7_n1.delta"),
        (common::a8(), 1, "a8_n1.delta"),
        (common::a8(), 2, "a8_n2.delta"),
        (common::a8(), 3, "a8_n3.delta"),
    ] {
        let d = assemble_delta(&atlas, n, &cfg()).unwrap();
        let k = kernel_report(&d.entries).unwrap();
        let want = std::fs::read_to_string(common::data_path("golden").join(file)).unwrap();
        assert_eq!(d.to_structured(&k), want, "{file}");
    }
}

#[test]
fn solver_cap_from_environment() {
    std::env::set_var(SOLVER_CAP_ENV, "12");
    assert_eq!(SolverConfig::from_env().cap, 12);
    std::env::set_var(SOLVER_CAP_ENV, "junk");
    assert_eq!(SolverConfig::from_env().cap, DEFAULT_SOLVER_CAP);
    std::env::remove_var(SOLVER_CAP_ENV);
}

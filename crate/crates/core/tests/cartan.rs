mod common;

use okapain_core::cartan::*;
use okapain_core::cas::{Var, RF};
use okapain_core::cech::{assemble_delta, SolverConfig};
use okapain_core::linalg;

/// Plain cofactor expansion, independent of the elimination code.
fn cofactor_det(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    (0..n)
        .filter(|&j| m[0][j] != 0)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(c, _)| *c != j).map(|(_, x)| *x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] * cofactor_det(&minor)
        })
        .sum()
}

#[test]
fn roster_shapes_and_tags() {
    let counts: Vec<usize> = AffineType::ALL.iter().map(|t| t.node_count()).collect();
    assert_eq!(counts, [9, 8, 7, 9, 8, 7, 6, 5, 9]);
    assert_eq!(AffineType::E7.painleve_tag(), Some("P_II"));
    assert_eq!(AffineType::D4.painleve_tag(), Some("P_VI"));
    assert_eq!(AffineType::A8.painleve_tag(), None);
    assert_eq!(AffineType::parse("e7").unwrap(), AffineType::E7);
    assert_eq!(AffineType::parse("D6~").unwrap(), AffineType::D6);
    assert_eq!(AffineType::parse("F4~"), Err(CartanError::UnknownType("F4~".into())));
}

#[test]
fn symmetric_with_minus_two_diagonal() {
    for t in AffineType::ALL {
        let m = cartan_matrix(t);
        for i in 0..m.len() {
            assert_eq!(m[i][i], -2, "{t}");
            for j in 0..m.len() {
                assert_eq!(m[i][j], m[j][i], "{t}");
            }
        }
    }
}

#[test]
fn e7_matches_the_shipped_intersection_matrix() {
    assert_eq!(cartan_matrix(AffineType::E7), common::e7().intersection);
    assert_eq!(cartan_matrix(AffineType::A8), common::a8().intersection);
    assert_eq!(multiplicities(AffineType::E7), common::e7().multiplicities());
}

#[test]
fn d4_is_a_star() {
    let m = cartan_matrix(AffineType::D4);
    assert_eq!(m[1], vec![1, -2, 1, 1, 1]);
    for leaf in [0, 2, 3, 4] {
        assert_eq!(m[leaf].iter().filter(|&&x| x == 1).count(), 1);
    }
}

#[test]
fn kernel_is_the_multiplicity_vector() {
    for t in AffineType::ALL {
        let m = cartan_matrix(t);
        let mult = multiplicities(t);
        for row in &m {
            let dot: i64 = row.iter().zip(&mult).map(|(a, &b)| a * b as i64).sum();
            assert_eq!(dot, 0, "{t}");
        }
        assert!(mult.iter().all(|&x| x > 0));
        assert!(affine_rank_check(t).is_pass(), "{}", affine_rank_check(t));
    }
}

#[test]
fn removing_the_affine_node_leaves_the_finite_diagram() {
    let want = [
        (AffineType::E8, 1),
        (AffineType::E7, 2),
        (AffineType::E6, 3),
        (AffineType::D8, 4),
        (AffineType::D7, 4),
        (AffineType::D6, 4),
        (AffineType::D5, 4),
        (AffineType::D4, 4),
        (AffineType::A8, 9),
    ];
    for (t, d) in want {
        let m = cartan_matrix(t);
        assert_eq!(cofactor_det(&m), 0, "{t}");
        let finite: Vec<Vec<i64>> = m[1..].iter().map(|r| r[1..].to_vec()).collect();
        assert_eq!(cofactor_det(&finite).abs(), d, "{t}");
        assert_eq!(linalg::rank(&linalg::to_q(&m)), t.node_count() - 1, "{t}");
    }
}

#[test]
fn deformed_a8_determinant() {
    let u = RF::var(Var::new("u"));
    let d = linalg::bareiss_determinant(&deformed_a8(&u));
    let w = &u - &RF::one();
    assert_eq!(d, (&w * &w).checked_div(&u).unwrap());
    assert_eq!(linalg::determinant(&deformed_a8(&u)), d);
}

#[test]
fn computed_deltas_compare_equal() {
    let d = assemble_delta(&common::e7(), 1, &SolverConfig::default()).unwrap();
    assert!(compare(&d, AffineType::E7).is_pass());
    let r = compare(&d, AffineType::D4);
    assert_eq!(r.failures.len(), 1);
    assert_eq!(r.failures[0].check, "dimension");
    let r = compare(&d, AffineType::D7);
    assert!(!r.is_pass());

    for n in 1..=3 {
        let d = assemble_delta(&common::a8(), n, &SolverConfig::default()).unwrap();
        assert!(compare(&d, AffineType::A8).is_pass(), "n = {n}");
        let mut plain = d.clone();
        plain.twist = n + 1;
        assert_eq!(compare(&plain, AffineType::A8).failures.len(), 2);
    }
}

#[test]
fn structured_rendering() {
    let s = render_structured(AffineType::E7);
    assert!(s.contains("type = E7~\npainleve = P_II\n"));
    assert!(s.contains("kernel = (1, 2, 3, 4, 2, 3, 2, 1)"));
    assert!(s.contains("rank = 7"));
}

//! Affine intersection matrices for the Painleve roster, with -2 on the diagonal.

use crate::cas::{q, Var, RF};
use crate::cech::DeltaMatrix;
use crate::linalg;
use crate::report::Report;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CartanError {
    #[error("unknown affine type '{0}'")]
    UnknownType(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AffineType {
    E8,
    E7,
    E6,
    D8,
    D7,
    D6,
    D5,
    D4,
    A8,
}

impl AffineType {
    pub const ALL: [AffineType; 9] = [
        AffineType::E8,
        AffineType::E7,
        AffineType::E6,
        AffineType::D8,
        AffineType::D7,
        AffineType::D6,
        AffineType::D5,
        AffineType::D4,
        AffineType::A8,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            AffineType::E8 => "E8~",
            AffineType::E7 => "E7~",
            AffineType::E6 => "E6~",
            AffineType::D8 => "D8~",
            AffineType::D7 => "D7~",
            AffineType::D6 => "D6~",
            AffineType::D5 => "D5~",
            AffineType::D4 => "D4~",
            AffineType::A8 => "A8~",
        }
    }

    /// Accepts "E7~", "E7" or lower case.
    pub fn parse(s: &str) -> Result<AffineType, CartanError> {
        let key = s.trim().trim_end_matches('~').to_ascii_uppercase();
        AffineType::ALL
            .iter()
            .copied()
            .find(|t| t.label().trim_end_matches('~') == key)
            .ok_or_else(|| CartanError::UnknownType(s.to_string()))
    }

    pub fn node_count(&self) -> usize {
        match self {
            AffineType::E8 | AffineType::D8 | AffineType::A8 => 9,
            AffineType::E7 | AffineType::D7 => 8,
            AffineType::E6 | AffineType::D6 => 7,
            AffineType::D5 => 6,
            AffineType::D4 => 5,
        }
    }

    pub fn painleve_tag(&self) -> Option<&'static str> {
        match self {
            AffineType::E8 => Some("P_I"),
            AffineType::E7 => Some("P_II"),
            AffineType::D8 => Some("P_III^{D8}"),
            AffineType::D7 => Some("P_III^{D7}"),
            AffineType::D6 => Some("P_III = P_III^{D6}"),
            AffineType::E6 => Some("P_IV"),
            AffineType::D5 => Some("P_V"),
            AffineType::D4 => Some("P_VI"),
            AffineType::A8 => None,
        }
    }

    /// Edges of the diagram, 0-based.
    fn edges(&self) -> Vec<(usize, usize)> {
        match self {
            AffineType::E8 => {
                let mut e: Vec<_> = (0..7).map(|i| (i, i + 1)).collect();
                e.push((5, 8));
                e
            }
            AffineType::E7 => vec![(0, 1), (1, 2), (2, 3), (3, 4), (3, 5), (5, 6), (6, 7)],
            AffineType::E6 => vec![(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)],
            AffineType::A8 => (0..9).map(|i| (i, (i + 1) % 9)).collect(),
            d => {
                // leaf, c1, leaf, c2 .. ck, leaf, leaf
                let r = d.node_count();
                let k = r - 4;
                let chain: Vec<usize> = std::iter::once(1).chain(3..3 + k - 1).collect();
                let mut e = vec![(0, 1), (1, 2)];
                for w in chain.windows(2) {
                    e.push((w[0], w[1]));
                }
                let last = *chain.last().unwrap();
                e.push((last, r - 2));
                e.push((last, r - 1));
                e
            }
        }
    }
}

impl fmt::Display for AffineType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

pub fn cartan_matrix(t: AffineType) -> Vec<Vec<i64>> {
    let r = t.node_count();
    let mut m = vec![vec![0i64; r]; r];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = -2;
    }
    for (a, b) in t.edges() {
        m[a][b] = 1;
        m[b][a] = 1;
    }
    m
}

pub fn cartan_matrix_by_label(label: &str) -> Result<Vec<Vec<i64>>, CartanError> {
    Ok(cartan_matrix(AffineType::parse(label)?))
}

/// The m_i in Y = sum m_i Y_i, in node order.
pub fn multiplicities(t: AffineType) -> Vec<u32> {
    match t {
        AffineType::E8 => vec![1, 2, 3, 4, 5, 6, 4, 2, 3],
        AffineType::E7 => vec![1, 2, 3, 4, 2, 3, 2, 1],
        AffineType::E6 => vec![1, 2, 3, 2, 1, 2, 1],
        AffineType::A8 => vec![1; 9],
        d => {
            let r = d.node_count();
            let mut m = vec![2; r];
            for leaf in [0, 2, r - 2, r - 1] {
                m[leaf] = 1;
            }
            m
        }
    }
}

/// Rank r - 1 and a kernel spanned by the multiplicity vector.
pub fn affine_rank_check(t: AffineType) -> Report {
    let m = linalg::to_q(&cartan_matrix(t));
    let r = t.node_count();
    let mut report = Report::new(format!("affine check of {}", t));
    let rank = linalg::rank(&m);
    report.record(rank == r - 1, "rank r - 1", t.label(), || {
        format!("rank {rank}, expected {}", r - 1)
    });
    let ker = linalg::kernel(&m);
    let want: Vec<num_bigint::BigInt> = multiplicities(t).iter().map(|&x| x.into()).collect();
    let ok = ker.len() == 1 && linalg::primitive_integer_vector(&ker[0]) == want;
    report.record(ok, "kernel spanned by multiplicities", t.label(), || {
        let got: Vec<String> = ker
            .iter()
            .map(|v| {
                let p = linalg::primitive_integer_vector(v);
                format!("({})", p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "))
            })
            .collect();
        format!("kernel basis {}", got.join(" "))
    });
    report
}

/// The A8~ cycle with u^-1 at (2,3) and u at (3,2).
pub fn deformed_a8(u: &RF) -> Vec<Vec<RF>> {
    let mut m: Vec<Vec<RF>> = cartan_matrix(AffineType::A8)
        .iter()
        .map(|r| r.iter().map(|&x| RF::int(x)).collect())
        .collect();
    m[1][2] = u.inv().expect("u is nonzero");
    m[2][1] = u.clone();
    m
}

/// The library matrix a computed delta should equal. For A8~ this is the deformed cycle with u = (-t)^n.
pub fn template(t: AffineType, twist: u32) -> Vec<Vec<RF>> {
    match t {
        AffineType::A8 => {
            let u = RF::var(Var::new("t")).scale(&q(-1)).pow(twist);
            deformed_a8(&u)
        }
        _ => cartan_matrix(t)
            .iter()
            .map(|r| r.iter().map(|&x| RF::int(x)).collect())
            .collect(),
    }
}

/// Entrywise comparison. Never negates.
pub fn compare(m: &DeltaMatrix, t: AffineType) -> Report {
    let mut report = Report::new(format!("delta of {} against {}", m.atlas, t));
    let r = t.node_count();
    if m.size() != r {
        report.fail(
            "dimension",
            t.label(),
            format!("delta is {} x {}, {} has {} nodes", m.size(), m.size(), t, r),
        );
        return report;
    }
    let want = template(t, m.twist);
    for i in 0..r {
        for j in 0..r {
            let (a, b) = (&m.entries[i][j], &want[i][j]);
            report.record(a == b, "entry", format!("({}, {})", i + 1, j + 1), || {
                format!("delta has {}, {} has {}", a.render(), t, b.render())
            });
        }
    }
    report
}

/// Structured text in the same layout as a delta document.
pub fn render_structured(t: AffineType) -> String {
    let m = cartan_matrix(t);
    let labels: Vec<String> = (1..=t.node_count()).map(|i| format!("Y{i}")).collect();
    let mut s = String::from("cartan-matrix\n");
    s.push_str(&format!("type = {}\n", t));
    s.push_str(&format!("painleve = {}\n", t.painleve_tag().unwrap_or("none")));
    s.push_str(&format!("size = {} x {}\n", m.len(), m.len()));
    s.push_str(&format!("rows = {}\n", labels.join(" ")));
    s.push_str(&format!("columns = {}\n", labels.join(" ")));
    s.push_str("\n[entries]\n");
    for (l, row) in labels.iter().zip(&m) {
        let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("{}: {}\n", l, cells.join(" ; ")));
    }
    let qm = linalg::to_q(&m);
    let rank = linalg::rank(&qm);
    s.push_str("\n[kernel]\n");
    s.push_str(&format!("rank = {}\n", rank));
    s.push_str(&format!("kernel_dimension = {}\n", m.len() - rank));
    s.push_str(&format!("determinant = {}\n", crate::cas::render_q(&linalg::bareiss_determinant(&qm))));
    for v in linalg::kernel(&qm) {
        let p = linalg::primitive_integer_vector(&v);
        let cells: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("kernel = ({})\n", cells.join(", ")));
    }
    s
}

pub fn render_text(t: AffineType) -> String {
    let m = cartan_matrix(t);
    let mut s = format!(
        "{} ({}), {} nodes\n",
        t,
        t.painleve_tag().unwrap_or("no Painleve tag"),
        t.node_count()
    );
    for row in &m {
        let cells: Vec<String> = row.iter().map(|x| format!("{:>2}", x)).collect();
        s.push_str(&format!("[ {} ]\n", cells.join(" ")));
    }
    let qm = linalg::to_q(&m);
    s.push_str(&format!("rank {}\n", linalg::rank(&qm)));
    for v in linalg::kernel(&qm) {
        let p = linalg::primitive_integer_vector(&v);
        let cells: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        s.push_str(&format!("kernel ({})\n", cells.join(", ")));
    }
    s.push_str(&affine_rank_check(t).to_string());
    s
}

use super::{Atlas, AtlasError};
use crate::cas::{Var, RF};
use crate::linalg;
use crate::report::Report;
use std::collections::HashMap;

fn coords(atlas: &Atlas, chart: &str) -> [Var; 2] {
    let c = atlas.chart(chart).expect("chart exists");
    [Var::new(&c.coordinates[0]), Var::new(&c.coordinates[1])]
}

fn compiled(atlas: &Atlas) -> Result<HashMap<(String, String), [RF; 2]>, AtlasError> {
    let mut out = HashMap::new();
    for t in &atlas.transitions {
        out.insert(
            (t.source.clone(), t.target.clone()),
            [t.formulas[0].to_rf()?, t.formulas[1].to_rf()?],
        );
    }
    Ok(out)
}

fn substitution(atlas: &Atlas, target: &str, values: &[RF; 2]) -> HashMap<Var, RF> {
    let v = coords(atlas, target);
    HashMap::from([(v[0], values[0].clone()), (v[1], values[1].clone())])
}

/// Compose a -> b -> c, giving c's coordinates in a's.
fn compose(
    atlas: &Atlas,
    ab: &[RF; 2],
    b: &str,
    bc: &[RF; 2],
) -> Result<[RF; 2], crate::cas::CasError> {
    let s = substitution(atlas, b, ab);
    Ok([bc[0].substitute(&s)?, bc[1].substitute(&s)?])
}

fn label(s: &str, t: &str) -> String {
    format!("{s} -> {t}")
}

/// Round trips, agreement with global coordinates and the cocycle condition on triples.
pub fn verify_transitions(atlas: &Atlas) -> Result<Report, AtlasError> {
    let maps = compiled(atlas)?;
    let mut report = Report::new(format!("transitions of {}", atlas.name));

    for t in &atlas.transitions {
        let (s, k) = (t.source.as_str(), t.target.as_str());
        let back = match maps.get(&(k.to_string(), s.to_string())) {
            Some(b) => b,
            None => continue,
        };
        let there = &maps[&(s.to_string(), k.to_string())];
        let id = coords(atlas, s);
        let loc = format!("{s} -> {k} -> {s}");
        match compose(atlas, there, k, back) {
            Ok(r) => {
                let ok = r[0] == RF::var(id[0]) && r[1] == RF::var(id[1]);
                report.record(ok, "round trip", &loc, || {
                    format!("got ({}, {})", r[0].render(), r[1].render())
                });
            }
            Err(e) => report.fail("round trip", &loc, e.to_string()),
        }
    }

    let globals: HashMap<&str, [RF; 2]> = atlas
        .charts
        .iter()
        .filter_map(|c| {
            let g = c.globals.as_ref()?;
            Some((c.id.as_str(), [g[0].to_rf().ok()?, g[1].to_rf().ok()?]))
        })
        .collect();
    for t in &atlas.transitions {
        let (gs, gk) = match (globals.get(t.source.as_str()), globals.get(t.target.as_str())) {
            (Some(a), Some(b)) => (a, b),
            _ => continue,
        };
        let f = &maps[&(t.source.clone(), t.target.clone())];
        let loc = label(&t.source, &t.target);
        match compose(atlas, gs, &t.source, f) {
            Ok(r) => {
                let ok = r[0] == gk[0] && r[1] == gk[1];
                report.record(ok, "global agreement", &loc, || {
                    format!(
                        "formulas give ({}, {}), globals give ({}, {})",
                        r[0].render(),
                        r[1].render(),
                        gk[0].render(),
                        gk[1].render()
                    )
                });
            }
            Err(e) => report.fail("global agreement", &loc, e.to_string()),
        }
    }

    let mut seen = std::collections::BTreeSet::new();
    for comp in &atlas.components {
        let charts: Vec<&str> = comp.charts().collect();
        for &a in &charts {
            for &b in &charts {
                for &c in &charts {
                    if a == b || b == c || a == c || !seen.insert((a, b, c)) {
                        continue;
                    }
                    let key = |x: &str, y: &str| (x.to_string(), y.to_string());
                    let (ab, bc, ac) = match (maps.get(&key(a, b)), maps.get(&key(b, c)), maps.get(&key(a, c))) {
                        (Some(p), Some(q), Some(r)) => (p, q, r),
                        _ => continue,
                    };
                    let loc = format!("{a} -> {b} -> {c}");
                    match compose(atlas, ab, b, bc) {
                        Ok(r) => {
                            let ok = r[0] == ac[0] && r[1] == ac[1];
                            report.record(ok, "cocycle", &loc, || {
                                format!(
                                    "composite ({}, {}) but direct ({}, {})",
                                    r[0].render(),
                                    r[1].render(),
                                    ac[0].render(),
                                    ac[1].render()
                                )
                            });
                        }
                        Err(e) => report.fail("cocycle", &loc, e.to_string()),
                    }
                }
            }
        }
    }
    Ok(report)
}

/// Intersection form and multiplicity bookkeeping of the boundary divisor.
pub fn okamoto_painleve_check(atlas: &Atlas) -> Report {
    let m = &atlas.intersection;
    let r = atlas.rank();
    let ids: Vec<&str> = atlas.components.iter().map(|c| c.id.as_str()).collect();
    let mut report = Report::new(format!("intersection form of {}", atlas.name));

    for i in 0..r {
        report.record(m[i][i] == -2, "self-intersection", ids[i], || {
            format!("{}^2 = {}", ids[i], m[i][i])
        });
        for j in i + 1..r {
            let loc = format!("{},{}", ids[i], ids[j]);
            report.record(m[i][j] == m[j][i], "symmetry", &loc, || {
                format!("{} != {}", m[i][j], m[j][i])
            });
            report.record((0..=1).contains(&m[i][j]), "transversal crossings", &loc, || {
                format!("entry {}", m[i][j])
            });
        }
    }

    let mult = atlas.multiplicities();
    for i in 0..r {
        let y_dot: i64 = (0..r).map(|j| mult[j] as i64 * m[j][i]).sum();
        report.record(y_dot == 0, "Y.Y_i = 0", ids[i], || format!("Y.{} = {y_dot}", ids[i]));

        let meets: i64 = (0..r).filter(|&j| j != i).map(|j| m[i][j]).sum();
        let t = atlas.components[i].t_count as i64;
        report.record(meets == t, "meets count", ids[i], || {
            format!("declared {t}, intersection matrix gives {meets}")
        });
        let d_dot = m[i][i] + meets;
        report.record(d_dot == t - 2, "D.Y_i = t_i - 2", ids[i], || {
            format!("D.{} = {d_dot}, expected {}", ids[i], t - 2)
        });
    }

    // Name the components whose multiplicity disagrees with the kernel of the form.
    let qm = linalg::to_q(m);
    let ker = linalg::kernel(&qm);
    if ker.len() == 1 {
        let k = linalg::primitive_integer_vector(&ker[0]);
        let mut votes: HashMap<num_rational::BigRational, usize> = HashMap::new();
        for (ki, &mi) in k.iter().zip(&mult) {
            if *ki != 0.into() {
                let s = num_rational::BigRational::new(mi.into(), ki.clone());
                *votes.entry(s).or_default() += 1;
            }
        }
        if let Some((scale, _)) = votes.into_iter().max_by_key(|(s, c)| (*c, s.clone())) {
            let bad: Vec<&str> = (0..r)
                .filter(|&i| {
                    num_rational::BigRational::from(k[i].clone()) * &scale
                        != num_rational::BigRational::from(num_bigint::BigInt::from(mult[i]))
                })
                .map(|i| ids[i])
                .collect();
            let loc = if bad.is_empty() { "all".to_string() } else { bad.join(",") };
            report.record(bad.is_empty(), "multiplicities span the kernel", &loc, || {
                let want: Vec<String> = k.iter().map(|x| x.to_string()).collect();
                format!("kernel generator ({})", want.join(", "))
            });
        }
    } else {
        report.fail(
            "multiplicities span the kernel",
            "all",
            format!("kernel has dimension {}", ker.len()),
        );
    }
    report
}

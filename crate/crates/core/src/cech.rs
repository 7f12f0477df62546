//! Lifting theta, the restricted coboundary and class extraction against eta.

use crate::atlas::{Atlas, AtlasClass, AtlasError, Surface};
use crate::cas::{lcm, CasError, Poly, Var, Q, RF};
use crate::linalg;
use crate::sheaf::{
    check_twisted_membership, compile_field, component_value, pushforward, restrict,
    restricted_units, theta_section, BundleTag, SheafError, TwistedSection, VectorField,
};
use rand::{Rng, SeedableRng};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use thiserror::Error;

pub const DEFAULT_SOLVER_CAP: usize = 64;
pub const SOLVER_CAP_ENV: &str = "OKAPAIN_SOLVER_CAP";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CechError {
    #[error("theta {component} is not a twisted log section: {detail}")]
    MembershipViolation { component: String, detail: String },
    #[error("tangential part does not vanish along {component} on {overlap}: {residue}")]
    TangentialResidue {
        component: String,
        overlap: String,
        residue: String,
    },
    #[error("no class decomposition along {component} up to degree bound {bound}")]
    NoSolution { component: String, bound: usize },
    #[error("coefficient of eta {component} is not determined")]
    NonUniqueLambda { component: String },
    #[error("witness for {component} does not certify")]
    CertificationFailed { component: String },
    #[error("symbolic rank {symbolic} but rank {specialized} at {point}")]
    SpecializationMismatch {
        symbolic: usize,
        specialized: usize,
        point: String,
    },
    #[error("atlas {atlas} is {class}; the scan needs a multiplicative atlas")]
    UnsupportedAtlasClass { atlas: String, class: String },
    #[error("entry ({row}, {col}): {source}")]
    Entry {
        row: usize,
        col: usize,
        source: Box<CechError>,
    },
    #[error(transparent)]
    Sheaf(#[from] SheafError),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Cas(#[from] CasError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Largest Laurent degree bound tried before giving up.
    pub cap: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            cap: DEFAULT_SOLVER_CAP,
        }
    }
}

impl SolverConfig {
    pub fn from_env() -> SolverConfig {
        let cap = std::env::var(SOLVER_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .filter(|&c: &usize| c >= 1)
            .unwrap_or(DEFAULT_SOLVER_CAP);
        SolverConfig { cap }
    }
}

pub type Cochain0 = TwistedSection;

/// Normal values on the nerve overlaps of one component, in the second chart's running coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cochain1Along {
    pub component: usize,
    pub twist: u32,
    pub values: Vec<((usize, usize), RF)>,
}

impl Cochain1Along {
    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|(_, v)| v.is_zero())
    }

    pub fn add(&self, o: &Cochain1Along) -> Cochain1Along {
        let values = self
            .values
            .iter()
            .zip(&o.values)
            .map(|((e, a), (e2, b))| {
                assert_eq!(e, e2);
                (*e, a + b)
            })
            .collect();
        Cochain1Along {
            component: self.component,
            twist: self.twist,
            values,
        }
    }

    pub fn scale(&self, f: &RF) -> Cochain1Along {
        Cochain1Along {
            component: self.component,
            twist: self.twist,
            values: self.values.iter().map(|(e, v)| (*e, v * f)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassCoefficient {
    pub lambda: RF,
    /// Per nerve chart, a section in the chart's running coordinate.
    pub witness: BTreeMap<usize, RF>,
    pub degree_bound: usize,
}

fn comp_id(s: &Surface, i: usize) -> String {
    s.components[i].id.clone()
}

fn edge_label(s: &Surface, e: (usize, usize)) -> String {
    format!("{}-{}", s.chart(e.0).id, s.chart(e.1).id)
}

/// Reuse the table formulas on their charts, zero elsewhere.
pub fn lift(s: &Surface, j: usize) -> Result<Cochain0, CechError> {
    let sec = theta_section(s, j)?;
    let report = check_twisted_membership(s, &sec);
    if !report.is_pass() {
        let f = &report.failures[0];
        return Err(CechError::MembershipViolation {
            component: comp_id(s, j),
            detail: format!("{} at {}: {}", f.check, f.location, f.detail),
        });
    }
    Ok(sec)
}

/// (lift on k) - (lift on j) on each nerve overlap, as normal data along component i.
pub fn coboundary_restricted(s: &Surface, c0: &Cochain0, i: usize) -> Result<Cochain1Along, CechError> {
    let mut values = Vec::new();
    for &(j, k) in &s.components[i].nerve {
        let lj = c0.value(j);
        let lk = c0.value(k);
        if lj.is_zero() && lk.is_zero() {
            values.push(((j, k), RF::zero()));
            continue;
        }
        let moved = pushforward(s, &lj, k)?;
        let diff = lk.sub(&moved);
        let tangential = component_value(s, i, &diff, c0.twist, BundleTag::TangentTwisted)?;
        if !tangential.is_zero() {
            return Err(CechError::TangentialResidue {
                component: comp_id(s, i),
                overlap: edge_label(s, (j, k)),
                residue: tangential.render(),
            });
        }
        let normal = component_value(s, i, &diff, c0.twist, BundleTag::NormalTwisted)?;
        values.push(((j, k), normal));
    }
    Ok(Cochain1Along {
        component: i,
        twist: c0.twist,
        values,
    })
}

/// The eta generator of component i as normal data on its nerve.
pub fn eta_cochain(s: &Surface, i: usize) -> Result<Cochain1Along, CechError> {
    let id = &s.components[i].id;
    let mut values = Vec::new();
    for &(j, k) in &s.components[i].nerve {
        let (a, b) = (&s.chart(j).id, &s.chart(k).id);
        let entry = s
            .atlas
            .eta_for(id)
            .find(|e| &e.overlap.0 == a && &e.overlap.1 == b);
        let v = match entry {
            Some(e) => {
                let vf = compile_field(s, k, &e.field)?;
                if !vf.is_zero() {
                    let (_, z) = s.components[i].frame_on(k).expect("nerve chart");
                    let zi = s.chart(k).coordinate_index(z).unwrap();
                    if !vf.coefficient(zi).is_zero() {
                        return Err(CechError::Atlas(AtlasError::InvariantViolation {
                            invariant: "eta is normal to its component".into(),
                            location: format!("eta {} @ {}-{}", id, a, b),
                        }));
                    }
                }
                component_value(s, i, &vf, s.twist, BundleTag::NormalTwisted)?
            }
            None => RF::zero(),
        };
        values.push(((j, k), v));
    }
    Ok(Cochain1Along {
        component: i,
        twist: s.twist,
        values,
    })
}

/// How a section on chart j looks in chart k along component i.
struct Transport {
    /// Running coordinate of j as a function on the component in chart k.
    phi: RF,
    /// Normal value in chart k of the frame of chart j.
    rho: RF,
}

fn transport(s: &Surface, i: usize, j: usize, k: usize) -> Result<Transport, CechError> {
    let comp = &s.components[i];
    let (cj, zj) = comp.frame_on(j).expect("nerve chart");
    let (ck, _) = comp.frame_on(k).expect("nerve chart");
    let map = s.map(k, j).ok_or_else(|| SheafError::MissingInverse {
        from: s.chart(j).id.clone(),
        to: s.chart(k).id.clone(),
    })?;
    let zi = s.chart(j).coordinate_index(zj).unwrap();
    let phi = restrict(&map[zi], ck).map_err(|_| SheafError::ResidualPole {
        component: comp.id.clone(),
        chart: s.chart(k).id.clone(),
        value: map[zi].render(),
    })?;
    let ci = s.chart(j).coordinate_index(cj).unwrap();
    let f = &s.chart(j).divisor;
    let frame = RF::new(Poly::one(), f.pow(s.twist.saturating_sub(1)))?;
    let mut vf = VectorField::zero(j);
    if ci == 0 {
        vf.a = frame;
    } else {
        vf.b = frame;
    }
    let moved = pushforward(s, &vf, k)?;
    let rho = component_value(s, i, &moved, s.twist, BundleTag::NormalTwisted)?;
    Ok(Transport { phi, rho })
}

/// Regular functions on the chart's part of the component: polynomials plus partial fractions.
fn basis(s: &Surface, i: usize, chart: usize, bound: usize) -> Vec<RF> {
    let (_, z) = s.components[i].frame_on(chart).expect("nerve chart");
    let zr = RF::var(z);
    let mut out: Vec<RF> = (0..=bound).map(|e| zr.pow(e as u32)).collect();
    for u in restricted_units(s, i, chart) {
        let d = u.degree_in(z);
        let ur = RF::from_poly(u);
        for m in 1..=bound {
            let inv = ur.pow(m as u32).inv().expect("nonzero unit");
            for e in 0..d {
                out.push(&zr.pow(e) * &inv);
            }
        }
    }
    out
}

fn z_degree(f: &RF, z: Var) -> usize {
    f.numerator().degree_in(z).max(f.denominator().degree_in(z)) as usize
}

enum Solve {
    Found(ClassCoefficient),
    Inconsistent,
    Free,
}

fn running_coordinate(s: &Surface, i: usize, chart: usize) -> Var {
    s.components[i].frame_on(chart).expect("nerve chart").1
}

/// Apply the Cech coboundary to a 0-cochain of normal data: tau_k - rho * tau_j(phi).
pub fn coboundary_of(s: &Surface, i: usize, tau: &BTreeMap<usize, RF>) -> Result<Cochain1Along, CechError> {
    let mut values = Vec::new();
    for &(j, k) in &s.components[i].nerve {
        let tr = transport(s, i, j, k)?;
        let zero = RF::zero();
        let tk = tau.get(&k).unwrap_or(&zero);
        let tj = tau.get(&j).unwrap_or(&zero);
        let zj = running_coordinate(s, i, j);
        let moved = &tr.rho * &tj.substitute_one(zj, &tr.phi)?;
        values.push(((j, k), tk - &moved));
    }
    Ok(Cochain1Along {
        component: i,
        twist: s.twist,
        values,
    })
}

fn solve_at(
    s: &Surface,
    c1: &Cochain1Along,
    eta: Option<&Cochain1Along>,
    bound: usize,
) -> Result<Solve, CechError> {
    let i = c1.component;
    let comp = &s.components[i];
    let charts: Vec<usize> = comp.charts.iter().map(|e| e.0).collect();
    let mut unknowns: Vec<(usize, RF)> = Vec::new();
    for &p in &charts {
        for b in basis(s, i, p, bound) {
            unknowns.push((p, b));
        }
    }
    let with_lambda = eta.is_some();
    let ncols = unknowns.len() + with_lambda as usize;
    let mut rows: Vec<Vec<RF>> = Vec::new();

    for (e_idx, &(j, k)) in comp.nerve.iter().enumerate() {
        let tr = transport(s, i, j, k)?;
        let zk = running_coordinate(s, i, k);
        let zj = running_coordinate(s, i, j);
        let mut cols: Vec<RF> = Vec::with_capacity(ncols);
        for (p, b) in &unknowns {
            let mut g = RF::zero();
            if *p == k {
                g = &g - b;
            }
            if *p == j {
                g = &g + &(&tr.rho * &b.substitute_one(zj, &tr.phi)?);
            }
            cols.push(g);
        }
        if let Some(eta) = eta {
            cols.push(-&eta.values[e_idx].1);
        }
        let rhs = -&c1.values[e_idx].1;
        let mut den = Poly::one();
        for f in cols.iter().chain(std::iter::once(&rhs)) {
            if !f.is_zero() {
                den = lcm(&den, f.denominator());
            }
        }
        let cleared: Vec<Poly> = cols
            .iter()
            .chain(std::iter::once(&rhs))
            .map(|f| {
                f.mul_poly(&den)
                    .as_poly()
                    .cloned()
                    .expect("lcm clears every denominator")
            })
            .collect();
        let deg = cleared.iter().map(|p| p.degree_in(zk)).max().unwrap_or(0) as usize;
        let split: Vec<Vec<Poly>> = cleared.iter().map(|p| p.coefficients_in(zk)).collect();
        for d in 0..=deg {
            let row: Vec<RF> = split
                .iter()
                .map(|c| c.get(d).cloned().map(RF::from_poly).unwrap_or_else(RF::zero))
                .collect();
            if row.iter().any(|x| !x.is_zero()) {
                rows.push(row);
            }
        }
    }

    let pivots = linalg::rref(&mut rows);
    if pivots.contains(&ncols) {
        return Ok(Solve::Inconsistent);
    }
    let mut values = vec![RF::zero(); ncols];
    for (r, &p) in pivots.iter().enumerate() {
        values[p] = rows[r][ncols].clone();
    }
    let lambda = if with_lambda {
        if !pivots.contains(&(ncols - 1)) {
            return Ok(Solve::Free);
        }
        values[ncols - 1].clone()
    } else {
        RF::zero()
    };
    let mut witness: BTreeMap<usize, RF> = charts.iter().map(|&p| (p, RF::zero())).collect();
    for ((p, b), x) in unknowns.iter().zip(&values) {
        if !x.is_zero() {
            let w = witness.get_mut(p).unwrap();
            *w = &*w + &(b * x);
        }
    }
    Ok(Solve::Found(ClassCoefficient {
        lambda,
        witness,
        degree_bound: bound,
    }))
}

fn starting_bound(s: &Surface, c1: &Cochain1Along, eta: Option<&Cochain1Along>) -> usize {
    let i = c1.component;
    let mut deg = 0;
    for ((_, k), v) in c1
        .values
        .iter()
        .chain(eta.map(|e| e.values.iter()).into_iter().flatten())
    {
        deg = deg.max(z_degree(v, running_coordinate(s, i, *k)));
    }
    deg + 2
}

fn certify(
    s: &Surface,
    c1: &Cochain1Along,
    eta: Option<&Cochain1Along>,
    found: &ClassCoefficient,
) -> Result<(), CechError> {
    let d = coboundary_of(s, c1.component, &found.witness)?;
    let mut rhs = d;
    if let Some(eta) = eta {
        rhs = rhs.add(&eta.scale(&found.lambda));
    }
    if rhs.values != c1.values {
        return Err(CechError::CertificationFailed {
            component: comp_id(s, c1.component),
        });
    }
    Ok(())
}

fn extract(
    s: &Surface,
    c1: &Cochain1Along,
    eta: Option<&Cochain1Along>,
    cfg: &SolverConfig,
) -> Result<ClassCoefficient, CechError> {
    let cap = cfg.cap.max(1);
    let mut bound = starting_bound(s, c1, eta).min(cap);
    loop {
        match solve_at(s, c1, eta, bound)? {
            Solve::Found(found) => {
                certify(s, c1, eta, &found)?;
                return Ok(found);
            }
            Solve::Free => {
                return Err(CechError::NonUniqueLambda {
                    component: comp_id(s, c1.component),
                })
            }
            Solve::Inconsistent => {
                if bound >= cap {
                    return Err(CechError::NoSolution {
                        component: comp_id(s, c1.component),
                        bound,
                    });
                }
                bound = (bound * 2).min(cap);
            }
        }
    }
}

/// Solve c1 = lambda * eta + coboundary(tau).
pub fn extract_class(
    s: &Surface,
    c1: &Cochain1Along,
    eta: &Cochain1Along,
    cfg: &SolverConfig,
) -> Result<ClassCoefficient, CechError> {
    extract(s, c1, Some(eta), cfg)
}

/// Solve c1 = coboundary(tau) with no eta term.
pub fn solve_coboundary(s: &Surface, c1: &Cochain1Along, cfg: &SolverConfig) -> Result<ClassCoefficient, CechError> {
    extract(s, c1, None, cfg)
}

/// Entry (i, j) is the coefficient of eta_i in delta(theta_j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaMatrix {
    pub atlas: String,
    pub type_label: String,
    pub twist: u32,
    pub theta_labels: Vec<String>,
    pub eta_labels: Vec<String>,
    pub entries: Vec<Vec<RF>>,
}

impl DeltaMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &RF {
        &self.entries[i][j]
    }

    /// Column j, i.e. the decomposition of delta(theta_j).
    pub fn column(&self, j: usize) -> Vec<RF> {
        self.entries.iter().map(|r| r[j].clone()).collect()
    }

    pub fn to_structured(&self, k: &KernelReport) -> String {
        let mut s = String::new();
        s.push_str("delta-matrix\n");
        s.push_str(&format!("atlas = {}\n", self.atlas));
        s.push_str(&format!("type = {}\n", self.type_label));
        s.push_str(&format!("twist = {}\n", self.twist));
        s.push_str(&format!("size = {} x {}\n", self.size(), self.size()));
        s.push_str(&format!("rows = {}\n", self.eta_labels.join(" ")));
        s.push_str(&format!("columns = {}\n", self.theta_labels.join(" ")));
        s.push_str("\n[entries]\n");
        for (label, row) in self.eta_labels.iter().zip(&self.entries) {
            let cells: Vec<String> = row.iter().map(|x| x.render()).collect();
            s.push_str(&format!("{}: {}\n", label, cells.join(" ; ")));
        }
        s.push_str("\n[kernel]\n");
        s.push_str(&k.structured());
        s
    }

    pub fn to_text(&self, k: &KernelReport) -> String {
        let cells: Vec<Vec<String>> = self
            .entries
            .iter()
            .map(|r| r.iter().map(|x| x.render()).collect())
            .collect();
        let width: Vec<usize> = (0..self.size())
            .map(|j| {
                cells
                    .iter()
                    .map(|r| r[j].len())
                    .chain(std::iter::once(self.theta_labels[j].len()))
                    .max()
                    .unwrap_or(1)
            })
            .collect();
        let lw = self.eta_labels.iter().map(|l| l.len()).max().unwrap_or(2);
        let mut s = format!(
            "delta for {} ({}) at twist {}\n",
            self.atlas, self.type_label, self.twist
        );
        let head: Vec<String> = self
            .theta_labels
            .iter()
            .zip(&width)
            .map(|(l, w)| format!("{:>w$}", l, w = *w))
            .collect();
        s.push_str(&format!("{:lw$}   {}\n", "", head.join("  "), lw = lw));
        for (label, row) in self.eta_labels.iter().zip(&cells) {
            let r: Vec<String> = row
                .iter()
                .zip(&width)
                .map(|(c, w)| format!("{:>w$}", c, w = *w))
                .collect();
            s.push_str(&format!("{:lw$} [ {} ]\n", label, r.join("  "), lw = lw));
        }
        s.push('\n');
        s.push_str(&k.structured());
        s
    }
}

/// Coefficients of every eta in the coboundary of a 0-cochain. `col` only labels errors.
pub fn delta_of_cochain(
    s: &Surface,
    c0: &Cochain0,
    etas: &[Cochain1Along],
    col: usize,
    cfg: &SolverConfig,
) -> Result<Vec<RF>, CechError> {
    let wrap = |i: usize, e: CechError| CechError::Entry {
        row: i + 1,
        col: col + 1,
        source: Box::new(e),
    };
    let mut out = Vec::with_capacity(etas.len());
    for (i, eta) in etas.iter().enumerate() {
        let touches = s.components[i].charts.iter().any(|e| !c0.value(e.0).is_zero());
        if !touches {
            out.push(RF::zero());
            continue;
        }
        let c1 = coboundary_restricted(s, c0, i).map_err(|e| wrap(i, e))?;
        let found = extract_class(s, &c1, eta, cfg).map_err(|e| wrap(i, e))?;
        out.push(found.lambda);
    }
    Ok(out)
}

pub fn eta_cochains(s: &Surface) -> Result<Vec<Cochain1Along>, CechError> {
    (0..s.components.len()).map(|i| eta_cochain(s, i)).collect()
}

/// Lift, restrict and extract every entry.
pub fn assemble_delta(atlas: &Atlas, n: u32, cfg: &SolverConfig) -> Result<DeltaMatrix, CechError> {
    let s = Surface::new(atlas, n)?;
    assemble_delta_on(&s, cfg)
}

pub fn assemble_delta_on(s: &Surface, cfg: &SolverConfig) -> Result<DeltaMatrix, CechError> {
    let r = s.components.len();
    let etas = eta_cochains(s)?;
    let column = |j: usize| -> Result<Vec<RF>, CechError> {
        let c0 = lift(s, j).map_err(|e| CechError::Entry {
            row: j + 1,
            col: j + 1,
            source: Box::new(e),
        })?;
        delta_of_cochain(s, &c0, &etas, j, cfg)
    };
    let columns: Vec<Result<Vec<RF>, CechError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..r).map(|j| scope.spawn(move || column(j))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("worker panicked"))
            .collect()
    });
    let mut entries = vec![Vec::with_capacity(r); r];
    for col in columns {
        for (i, x) in col?.into_iter().enumerate() {
            entries[i].push(x);
        }
    }
    let labels: Vec<String> = s.components.iter().map(|c| c.id.clone()).collect();
    Ok(DeltaMatrix {
        atlas: s.atlas.name.clone(),
        type_label: s.atlas.type_label.clone(),
        twist: s.twist,
        theta_labels: labels.clone(),
        eta_labels: labels,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelReport {
    pub rank: usize,
    pub kernel_dimension: usize,
    pub determinant: RF,
    pub kernel_basis: Vec<Vec<RF>>,
    /// Parameter points used for the cross-check.
    pub specializations: Vec<String>,
}

impl KernelReport {
    pub fn structured(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("rank = {}\n", self.rank));
        s.push_str(&format!("kernel_dimension = {}\n", self.kernel_dimension));
        s.push_str(&format!("determinant = {}\n", self.determinant.render()));
        for v in &self.kernel_basis {
            let cells: Vec<String> = v.iter().map(|x| x.render()).collect();
            s.push_str(&format!("kernel = ({})\n", cells.join(", ")));
        }
        s
    }
}

fn render_point(p: &HashMap<Var, Q>) -> String {
    let mut parts: Vec<String> = p
        .iter()
        .map(|(v, x)| format!("{} = {}", v.name(), crate::cas::render_q(x)))
        .collect();
    parts.sort();
    format!("{{{}}}", parts.join(", "))
}

fn specialize_matrix(m: &[Vec<RF>], p: &HashMap<Var, Q>) -> Option<Vec<Vec<Q>>> {
    m.iter()
        .map(|r| r.iter().map(|x| x.evaluate(p).ok()).collect())
        .collect()
}

/// Rank, kernel and determinant over the parameter field, cross-checked at random points.
pub fn kernel_report(m: &[Vec<RF>]) -> Result<KernelReport, CechError> {
    let r = m.len();
    let rank = linalg::rank(m);
    let determinant = linalg::bareiss_determinant(m);
    let mut kernel_basis = linalg::kernel(m);
    for v in &mut kernel_basis {
        if let Some(lead) = v.iter().find(|x| !x.is_zero()).cloned() {
            for x in v.iter_mut() {
                *x = x.checked_div(&lead)?;
            }
        }
    }

    let mut params: Vec<Var> = m
        .iter()
        .flatten()
        .flat_map(|x| x.vars())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    params.sort();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0001);
    let mut specializations = Vec::new();
    let mut attempts = 0;
    while specializations.len() < 3 {
        attempts += 1;
        let point: HashMap<Var, Q> = params
            .iter()
            .map(|v| {
                let mut num: i64 = rng.gen_range(-60..=60);
                if num == 0 {
                    num = 7;
                }
                let den: i64 = rng.gen_range(1..=13);
                (*v, crate::cas::q_frac(num, den))
            })
            .collect();
        let spec = match specialize_matrix(m, &point) {
            Some(x) => x,
            None => continue,
        };
        let srank = linalg::rank(&spec);
        if srank != rank {
            // an unlucky point can only lower the rank; retry a few times before calling it a bug
            if srank > rank || attempts > 12 {
                return Err(CechError::SpecializationMismatch {
                    symbolic: rank,
                    specialized: srank,
                    point: render_point(&point),
                });
            }
            continue;
        }
        specializations.push(render_point(&point));
    }
    Ok(KernelReport {
        rank,
        kernel_dimension: r - rank,
        determinant,
        kernel_basis,
        specializations,
    })
}

/// ((-t)^n - 1)^2 / (-t)^n
pub fn expected_a8_determinant(n: u32) -> RF {
    let u = RF::var(Var::new("t")).scale(&crate::cas::q(-1)).pow(n);
    let w = &u - &RF::one();
    (&w * &w).checked_div(&u).expect("nonzero")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanRow {
    pub n: u32,
    pub determinant: RF,
    pub kernel_dimension: usize,
    pub matches_closed_form: bool,
    /// Rational t with (-t)^n = 1 and the rank of delta there.
    pub rational_locus: Vec<(Q, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanReport {
    pub atlas: String,
    pub rows: Vec<ScanRow>,
}

impl ScanReport {
    pub fn all_match(&self) -> bool {
        self.rows.iter().all(|r| r.matches_closed_form)
    }

    pub fn first_mismatch(&self) -> Option<u32> {
        self.rows.iter().find(|r| !r.matches_closed_form).map(|r| r.n)
    }
}

impl fmt::Display for ScanReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vanishing scan for {}", self.atlas)?;
        for r in &self.rows {
            let locus: Vec<String> = r
                .rational_locus
                .iter()
                .map(|(t, rk)| format!("t = {} (rank {})", crate::cas::render_q(t), rk))
                .collect();
            writeln!(
                f,
                "n = {}: det = {}; kernel dimension {}; closed form {}; det vanishes where (-t)^{} = 1, rational points {}",
                r.n,
                r.determinant.render(),
                r.kernel_dimension,
                if r.matches_closed_form { "matches" } else { "MISMATCH" },
                r.n,
                locus.join(", ")
            )?;
        }
        if self.all_match() && self.rows.iter().all(|r| r.kernel_dimension == 0) {
            writeln!(
                f,
                "H^0 vanishes for all tested n; under the inductive criterion, H^1_D = 0 up to the tested range when -t is not a root of unity"
            )?;
        }
        Ok(())
    }
}

/// Determinants and kernels of delta_n for n = 1..n_max on a multiplicative atlas.
pub fn vanishing_scan(atlas: &Atlas, n_max: u32, cfg: &SolverConfig) -> Result<ScanReport, CechError> {
    if atlas.class != AtlasClass::Multiplicative {
        return Err(CechError::UnsupportedAtlasClass {
            atlas: atlas.name.clone(),
            class: atlas.class.label().into(),
        });
    }
    let t = Var::new("t");
    let mut rows = Vec::new();
    for n in 1..=n_max {
        let d = assemble_delta(atlas, n, cfg)?;
        let k = kernel_report(&d.entries)?;
        let mut roots = vec![crate::cas::q(-1)];
        if n % 2 == 0 {
            roots.push(crate::cas::q(1));
        }
        let mut locus = Vec::new();
        for root in roots {
            let p = HashMap::from([(t, root.clone())]);
            if let Some(spec) = specialize_matrix(&d.entries, &p) {
                locus.push((root, linalg::rank(&spec)));
            }
        }
        rows.push(ScanRow {
            n,
            matches_closed_form: k.determinant == expected_a8_determinant(n),
            determinant: k.determinant,
            kernel_dimension: k.kernel_dimension,
            rational_locus: locus,
        });
    }
    Ok(ScanReport {
        atlas: atlas.name.clone(),
        rows,
    })
}

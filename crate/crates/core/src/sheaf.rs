//! Vector fields on charts, twist frames along D and restriction to components.

use crate::atlas::{AtlasError, FieldExpr, Surface};
use crate::cas::{laurent_normal_form, CasError, LaurentPolynomial, Poly, Var, Q, RF};
use crate::report::Report;
use num_traits::Zero;
use std::collections::{BTreeMap, HashMap};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SheafError {
    #[error("no transition from {to} back to {from}, cannot push forward")]
    MissingInverse { from: String, to: String },
    #[error("pole along {component} remains on {chart} after clearing the frame: {value}")]
    ResidualPole {
        component: String,
        chart: String,
        value: String,
    },
    #[error("{chart} is not a chart of {component}")]
    NotOnComponent { component: String, chart: String },
    #[error(transparent)]
    Atlas(#[from] AtlasError),
    #[error(transparent)]
    Cas(#[from] CasError),
}

/// a * d/d(first coordinate) + b * d/d(second coordinate) on one chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VectorField {
    pub chart: usize,
    pub a: RF,
    pub b: RF,
}

impl VectorField {
    pub fn zero(chart: usize) -> VectorField {
        VectorField {
            chart,
            a: RF::zero(),
            b: RF::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn coefficient(&self, i: usize) -> &RF {
        if i == 0 {
            &self.a
        } else {
            &self.b
        }
    }

    pub fn scale(&self, f: &RF) -> VectorField {
        VectorField {
            chart: self.chart,
            a: &self.a * f,
            b: &self.b * f,
        }
    }

    pub fn add(&self, o: &VectorField) -> VectorField {
        assert_eq!(self.chart, o.chart, "fields on different charts");
        VectorField {
            chart: self.chart,
            a: &self.a + &o.a,
            b: &self.b + &o.b,
        }
    }

    pub fn sub(&self, o: &VectorField) -> VectorField {
        self.add(&o.scale(&RF::int(-1)))
    }

    /// Apply as a derivation.
    pub fn apply(&self, s: &Surface, f: &RF) -> RF {
        let [x, y] = s.chart(self.chart).coords;
        &(&self.a * &f.derivative(x)) + &(&self.b * &f.derivative(y))
    }

    pub fn render(&self, s: &Surface) -> String {
        let [x, y] = s.chart(self.chart).coords;
        let mut parts = Vec::new();
        for (c, v) in [(&self.a, x), (&self.b, y)] {
            if !c.is_zero() {
                parts.push(format!("({}) d/d{}", c.render(), v.name()));
            }
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// Compile a parsed field on a chart. The field must be instantiated.
pub fn compile_field(s: &Surface, chart: usize, f: &FieldExpr) -> Result<VectorField, AtlasError> {
    let mut vf = VectorField::zero(chart);
    for (e, coord) in &f.terms {
        let c = s
            .chart(chart)
            .coordinate_index(Var::new(coord))
            .ok_or_else(|| AtlasError::UnknownReference {
                kind: "coordinate".into(),
                name: coord.clone(),
                line: 0,
            })?;
        let v = e.to_rf()?;
        if c == 0 {
            vf.a = &vf.a + &v;
        } else {
            vf.b = &vf.b + &v;
        }
    }
    Ok(vf)
}

/// Push a field to another chart along the recorded transitions.
pub fn pushforward(s: &Surface, vf: &VectorField, to: usize) -> Result<VectorField, SheafError> {
    if vf.chart == to {
        return Ok(vf.clone());
    }
    if vf.is_zero() {
        return Ok(VectorField::zero(to));
    }
    let missing = || SheafError::MissingInverse {
        from: s.chart(vf.chart).id.clone(),
        to: s.chart(to).id.clone(),
    };
    let forward = s.map(vf.chart, to).ok_or_else(missing)?;
    let back = s.pullback(to, vf.chart).ok_or_else(missing)?;
    let a = vf.apply(s, &forward[0]).substitute(&back)?;
    let b = vf.apply(s, &forward[1]).substitute(&back)?;
    Ok(VectorField { chart: to, a, b })
}

fn strip_inverted(s: &Surface, chart: usize, den: &Poly) -> Poly {
    let mut d = den.clone();
    for u in &s.chart(chart).inverted {
        while let Some(q) = d.exact_div(u) {
            if d.is_constant() {
                break;
            }
            d = q;
        }
    }
    d
}

/// No poles on the chart apart from the inverted polynomials.
pub fn is_regular(s: &Surface, chart: usize, f: &RF) -> bool {
    let d = strip_inverted(s, chart, f.denominator());
    let coords = s.chart(chart).coords;
    !coords.iter().any(|v| d.contains_var(*v))
}

fn vanishes_on(p: &Poly, c: Var) -> bool {
    p.specialize(&HashMap::from([(c, Q::zero())])).is_zero()
}

/// Logarithmic along D: the d/dc coefficient is divisible by c for every component c = 0.
pub fn is_log(s: &Surface, vf: &VectorField) -> bool {
    let chart = s.chart(vf.chart);
    for comp in &s.components {
        if let Some((c, _)) = comp.frame_on(vf.chart) {
            let i = chart.coordinate_index(c).expect("equation is a coordinate");
            let coef = vf.coefficient(i);
            if coef.is_zero() {
                continue;
            }
            if !vanishes_on(coef.numerator(), c) || vanishes_on(coef.denominator(), c) {
                return false;
            }
        }
    }
    true
}

/// A family of chart values with pole order at most `twist` along D.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedSection {
    pub twist: u32,
    pub values: BTreeMap<usize, VectorField>,
}

impl TwistedSection {
    pub fn zero(twist: u32) -> TwistedSection {
        TwistedSection {
            twist,
            values: BTreeMap::new(),
        }
    }

    pub fn value(&self, chart: usize) -> VectorField {
        self.values
            .get(&chart)
            .cloned()
            .unwrap_or_else(|| VectorField::zero(chart))
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
}

pub fn check_twisted_membership(s: &Surface, sec: &TwistedSection) -> Report {
    let mut report = Report::new(format!("membership at twist {}", sec.twist));
    for (&chart, vf) in &sec.values {
        let id = &s.chart(chart).id;
        let f = RF::from_poly(s.chart(chart).divisor.pow(sec.twist));
        let cleared = vf.scale(&f);
        let regular = is_regular(s, chart, &cleared.a) && is_regular(s, chart, &cleared.b);
        report.record(regular, "pole order within twist", id, || {
            format!("f^{} * field = {}", sec.twist, cleared.render(s))
        });
        if regular {
            report.record(is_log(s, &cleared), "logarithmic along D", id, || {
                format!("cleared field {}", cleared.render(s))
            });
        }
    }
    report
}

/// Set the defining coordinate to zero, insisting there is no pole left along it.
pub fn restrict(f: &RF, c: Var) -> Result<RF, Option<RF>> {
    if f.is_zero() {
        return Ok(RF::zero());
    }
    if vanishes_on(f.denominator(), c) {
        return Err(Some(f.clone()));
    }
    let at = HashMap::from([(c, Q::zero())]);
    RF::new(f.numerator().specialize(&at), f.denominator().specialize(&at)).map_err(|_| None)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BundleTag {
    /// Theta of the component twisted by N_D^n, frame f^-n d/dz.
    TangentTwisted,
    /// N of the component twisted by N_D^(n-1), frame f^-(n-1) d/dc.
    NormalTwisted,
}

fn frame(s: &Surface, comp: usize, chart: usize) -> Result<(Var, Var), SheafError> {
    s.components[comp]
        .frame_on(chart)
        .ok_or_else(|| SheafError::NotOnComponent {
            component: s.components[comp].id.clone(),
            chart: s.chart(chart).id.clone(),
        })
}

/// Coefficient of the restricted field in the frame of the requested bundle, as a function of z.
pub fn component_value(
    s: &Surface,
    comp: usize,
    vf: &VectorField,
    twist: u32,
    tag: BundleTag,
) -> Result<RF, SheafError> {
    let (c, z) = frame(s, comp, vf.chart)?;
    let chart = s.chart(vf.chart);
    let (coef, power) = match tag {
        BundleTag::TangentTwisted => (vf.coefficient(chart.coordinate_index(z).unwrap()), twist),
        BundleTag::NormalTwisted => (
            vf.coefficient(chart.coordinate_index(c).unwrap()),
            twist.saturating_sub(1),
        ),
    };
    let framed = coef.mul_poly(&chart.divisor.pow(power));
    restrict(&framed, c).map_err(|e| SheafError::ResidualPole {
        component: s.components[comp].id.clone(),
        chart: chart.id.clone(),
        value: e.map(|f| f.render()).unwrap_or_default(),
    })
}

/// Inverted polynomials of a chart restricted to the component, nonconstant ones only.
pub fn restricted_units(s: &Surface, comp: usize, chart: usize) -> Vec<Poly> {
    let (c, z) = match s.components[comp].frame_on(chart) {
        Some(f) => f,
        None => return Vec::new(),
    };
    let at = HashMap::from([(c, Q::zero())]);
    s.chart(chart)
        .inverted
        .iter()
        .map(|u| u.specialize(&at))
        .filter(|u| u.contains_var(z))
        .map(|u| u.monic())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Site {
    Chart(usize),
    Overlap(usize, usize),
}

/// Laurent data in the running coordinate of a component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionAlongComponent {
    pub component: usize,
    pub tag: BundleTag,
    pub twist: u32,
    pub values: BTreeMap<Site, LaurentPolynomial>,
}

impl SectionAlongComponent {
    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| v.is_zero())
    }
}

pub fn laurent_along(s: &Surface, comp: usize, chart: usize, value: &RF) -> Result<LaurentPolynomial, SheafError> {
    let (_, z) = frame(s, comp, chart)?;
    Ok(laurent_normal_form(value, z, &restricted_units(s, comp, chart))?)
}

/// Restrict every chart value of the section lying on the component.
pub fn restrict_to_component(
    s: &Surface,
    sec: &TwistedSection,
    comp: usize,
    tag: BundleTag,
) -> Result<SectionAlongComponent, SheafError> {
    let mut values = BTreeMap::new();
    for &(chart, _, _) in &s.components[comp].charts {
        let vf = sec.value(chart);
        let v = component_value(s, comp, &vf, sec.twist, tag)?;
        values.insert(Site::Chart(chart), laurent_along(s, comp, chart, &v)?);
    }
    Ok(SectionAlongComponent {
        component: comp,
        tag,
        twist: sec.twist,
        values,
    })
}

/// Chart values of theta for one component, compiled at the surface twist.
pub fn theta_section(s: &Surface, comp: usize) -> Result<TwistedSection, SheafError> {
    let id = &s.components[comp].id;
    let mut sec = TwistedSection::zero(s.twist);
    for e in s.atlas.theta_for(id) {
        let chart = s.chart_index(&e.chart).expect("validated");
        let vf = compile_field(s, chart, &e.field)?;
        sec.values.insert(chart, vf);
    }
    Ok(sec)
}

/// Tangential residue of (lift on k) minus (lift on j pushed to k) along the component.
pub fn tangential_mismatch(
    s: &Surface,
    comp: usize,
    lift_j: &VectorField,
    lift_k: &VectorField,
    twist: u32,
) -> Result<RF, SheafError> {
    let moved = pushforward(s, lift_j, lift_k.chart)?;
    let diff = lift_k.sub(&moved);
    component_value(s, comp, &diff, twist, BundleTag::TangentTwisted)
}

/// The chart values of theta glue along the component.
pub fn cocycle_check_theta_section(s: &Surface, comp: usize, sec: &TwistedSection) -> Report {
    let c = &s.components[comp];
    let mut report = Report::new(format!("theta {} glues", c.id));
    let charts: Vec<usize> = sec
        .values
        .keys()
        .copied()
        .filter(|ch| c.frame_on(*ch).is_some())
        .collect();
    for (n, &j) in charts.iter().enumerate() {
        for &k in &charts[n + 1..] {
            if s.map(j, k).is_none() || s.map(k, j).is_none() {
                continue;
            }
            let loc = format!("{}-{}", s.chart(j).id, s.chart(k).id);
            match tangential_mismatch(s, comp, &sec.value(j), &sec.value(k), sec.twist) {
                Ok(r) => report.record(r.is_zero(), "theta agrees on overlap", &loc, || {
                    format!("residue {}", r.render())
                }),
                Err(e) => report.fail("theta agrees on overlap", &loc, e.to_string()),
            }
        }
    }
    report
}

pub fn cocycle_check_theta(s: &Surface, comp: usize) -> Result<Report, SheafError> {
    Ok(cocycle_check_theta_section(s, comp, &theta_section(s, comp)?))
}

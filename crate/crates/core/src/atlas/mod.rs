//! Chart atlases of surfaces with a normal-crossing divisor.

mod expr;
mod format;
mod surface;
mod verify;

pub use expr::{Exponent, Expr, FieldExpr};
pub use format::{load_atlas, load_atlas_file, render};
pub use surface::{ChartGeometry, ComponentGeometry, Surface};
pub use verify::{okamoto_painleve_check, verify_transitions};

use crate::cas::{CasError, Poly, Var};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AtlasError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown {kind} '{name}' at line {line}")]
    UnknownReference {
        kind: String,
        name: String,
        line: usize,
    },
    #[error("invariant violated ({invariant}) at {location}")]
    InvariantViolation { invariant: String, location: String },
    #[error("exponent {exponent} is negative at twist {twist}")]
    NegativeExponentAfterInstantiation { exponent: String, twist: u32 },
    #[error("expression {0} still contains the twist symbol")]
    UninstantiatedTwist(String),
    #[error("atlas {atlas} has fixed twist and cannot be instantiated at n = {twist}")]
    UnsupportedTwist { atlas: String, twist: u32 },
    #[error(transparent)]
    Cas(#[from] CasError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AtlasClass {
    Additive,
    Multiplicative,
}

impl AtlasClass {
    pub fn label(&self) -> &'static str {
        match self {
            AtlasClass::Additive => "additive",
            AtlasClass::Multiplicative => "multiplicative",
        }
    }
}

/// Whether generator formulas depend on the formal twist n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TwistMode {
    Fixed,
    Variable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chart {
    pub id: String,
    pub coordinates: [String; 2],
    pub inverted: Vec<Expr>,
    pub globals: Option<[Expr; 2]>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub source: String,
    pub target: String,
    /// Target coordinates in order, as expressions in the source coordinates.
    pub formulas: [Expr; 2],
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub multiplicity: u32,
    pub t_count: u32,
    /// (chart, defining coordinate)
    pub local_equations: Vec<(String, String)>,
    pub nerve: Vec<(String, String)>,
    pub principal: (String, String),
}

impl Component {
    pub fn charts(&self) -> impl Iterator<Item = &str> {
        self.local_equations.iter().map(|e| e.0.as_str())
    }

    pub fn equation_on(&self, chart: &str) -> Option<&str> {
        self.local_equations
            .iter()
            .find(|e| e.0 == chart)
            .map(|e| e.1.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaEntry {
    pub component: String,
    pub chart: String,
    pub field: FieldExpr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaEntry {
    pub component: String,
    pub overlap: (String, String),
    pub field: FieldExpr,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GeneratorTable {
    pub theta: Vec<ThetaEntry>,
    pub eta: Vec<EtaEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Atlas {
    pub name: String,
    pub type_label: String,
    pub class: AtlasClass,
    pub twist_mode: TwistMode,
    /// Set once every twist exponent has been replaced by a number.
    pub instantiated: Option<u32>,
    pub comments: Vec<String>,
    pub charts: Vec<Chart>,
    pub transitions: Vec<Transition>,
    pub components: Vec<Component>,
    pub intersection: Vec<Vec<i64>>,
    pub generators: GeneratorTable,
}

impl Atlas {
    pub fn chart(&self, id: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.id == id)
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.id == id)
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn transition(&self, source: &str, target: &str) -> Option<&Transition> {
        self.transitions
            .iter()
            .find(|t| t.source == source && t.target == target)
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn multiplicities(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.multiplicity).collect()
    }

    pub fn theta_for(&self, component: &str) -> impl Iterator<Item = &ThetaEntry> {
        let component = component.to_string();
        self.generators
            .theta
            .iter()
            .filter(move |e| e.component == component)
    }

    pub fn eta_for(&self, component: &str) -> impl Iterator<Item = &EtaEntry> {
        let component = component.to_string();
        self.generators
            .eta
            .iter()
            .filter(move |e| e.component == component)
    }

    pub fn has_twist_symbol(&self) -> bool {
        self.generators.theta.iter().any(|e| e.field.terms.iter().any(|t| t.0.has_twist()))
            || self.generators.eta.iter().any(|e| e.field.terms.iter().any(|t| t.0.has_twist()))
    }
}

/// Replace the formal twist symbol by n everywhere.
pub fn instantiate_twist(atlas: &Atlas, n: u32) -> Result<Atlas, AtlasError> {
    if let Some(done) = atlas.instantiated {
        if done == n {
            return Ok(atlas.clone());
        }
        return Err(AtlasError::UnsupportedTwist {
            atlas: atlas.name.clone(),
            twist: n,
        });
    }
    if atlas.twist_mode == TwistMode::Fixed && n != 1 {
        return Err(AtlasError::UnsupportedTwist {
            atlas: atlas.name.clone(),
            twist: n,
        });
    }
    let mut out = atlas.clone();
    for e in &mut out.generators.theta {
        e.field = e.field.instantiate(n)?;
    }
    for e in &mut out.generators.eta {
        e.field = e.field.instantiate(n)?;
    }
    out.instantiated = Some(n);
    Ok(out)
}

/// Product of the defining coordinates of every component meeting the chart.
pub fn local_divisor_equation(atlas: &Atlas, chart: &str) -> Poly {
    let mut f = Poly::one();
    for c in &atlas.components {
        for (ch, coord) in &c.local_equations {
            if ch == chart {
                f = &f * &Poly::var(Var::new(coord));
            }
        }
    }
    f
}

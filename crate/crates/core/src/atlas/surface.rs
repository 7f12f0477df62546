use super::{instantiate_twist, local_divisor_equation, Atlas, AtlasError};
use crate::cas::{Poly, Var, RF};
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct ChartGeometry {
    pub id: String,
    pub coords: [Var; 2],
    pub inverted: Vec<Poly>,
    /// Local equation of D on this chart.
    pub divisor: Poly,
}

impl ChartGeometry {
    pub fn coordinate_index(&self, v: Var) -> Option<usize> {
        self.coords.iter().position(|c| *c == v)
    }
}

#[derive(Clone, Debug)]
pub struct ComponentGeometry {
    pub id: String,
    pub multiplicity: u32,
    pub t_count: u32,
    /// (chart index, defining coordinate c, running coordinate z)
    pub charts: Vec<(usize, Var, Var)>,
    pub nerve: Vec<(usize, usize)>,
    pub principal: (usize, usize),
}

impl ComponentGeometry {
    pub fn frame_on(&self, chart: usize) -> Option<(Var, Var)> {
        self.charts
            .iter()
            .find(|e| e.0 == chart)
            .map(|e| (e.1, e.2))
    }
}

/// An atlas at a concrete twist with every formula compiled to rational functions.
#[derive(Clone, Debug)]
pub struct Surface {
    pub atlas: Atlas,
    pub twist: u32,
    pub charts: Vec<ChartGeometry>,
    pub components: Vec<ComponentGeometry>,
    index: HashMap<String, usize>,
    maps: HashMap<(usize, usize), [RF; 2]>,
}

impl Surface {
    pub fn new(atlas: &Atlas, n: u32) -> Result<Surface, AtlasError> {
        let atlas = instantiate_twist(atlas, n)?;
        let mut index = HashMap::new();
        let mut charts = Vec::new();
        for (i, c) in atlas.charts.iter().enumerate() {
            index.insert(c.id.clone(), i);
            let mut inverted = Vec::new();
            for e in &c.inverted {
                let f = e.to_rf()?;
                let p = f.as_poly().cloned().ok_or_else(|| AtlasError::InvariantViolation {
                    invariant: "inverted entries are polynomials".into(),
                    location: format!("chart {}", c.id),
                })?;
                inverted.push(p.monic());
            }
            charts.push(ChartGeometry {
                id: c.id.clone(),
                coords: [Var::new(&c.coordinates[0]), Var::new(&c.coordinates[1])],
                inverted,
                divisor: local_divisor_equation(&atlas, &c.id),
            });
        }
        let mut maps = HashMap::new();
        for t in &atlas.transitions {
            let key = (index[&t.source], index[&t.target]);
            maps.insert(key, [t.formulas[0].to_rf()?, t.formulas[1].to_rf()?]);
        }
        let mut components = Vec::new();
        for c in &atlas.components {
            let mut list = Vec::new();
            for (ch, coord) in &c.local_equations {
                let i = index[ch];
                let cv = Var::new(coord);
                let z = if charts[i].coords[0] == cv {
                    charts[i].coords[1]
                } else {
                    charts[i].coords[0]
                };
                list.push((i, cv, z));
            }
            components.push(ComponentGeometry {
                id: c.id.clone(),
                multiplicity: c.multiplicity,
                t_count: c.t_count,
                charts: list,
                nerve: c.nerve.iter().map(|(a, b)| (index[a], index[b])).collect(),
                principal: (index[&c.principal.0], index[&c.principal.1]),
            });
        }
        Ok(Surface {
            atlas,
            twist: n,
            charts,
            components,
            index,
            maps,
        })
    }

    pub fn chart_index(&self, id: &str) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn chart(&self, i: usize) -> &ChartGeometry {
        &self.charts[i]
    }

    /// Coordinates of `to` as functions on `from`.
    pub fn map(&self, from: usize, to: usize) -> Option<&[RF; 2]> {
        self.maps.get(&(from, to))
    }

    /// Substitution expressing the coordinates of `to` in the coordinates of `from`.
    pub fn pullback(&self, from: usize, to: usize) -> Option<HashMap<Var, RF>> {
        if from == to {
            let c = &self.charts[from];
            return Some(c.coords.iter().map(|v| (*v, RF::var(*v))).collect());
        }
        let f = self.map(from, to)?;
        let target = &self.charts[to];
        Some(
            target
                .coords
                .iter()
                .zip(f.iter())
                .map(|(v, e)| (*v, e.clone()))
                .collect(),
        )
    }

    pub fn component_index(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }
}

use serde::{Deserialize, Serialize};

use super::flux::FluxScheme;
use crate::error::SolverError;
use crate::exec::Execution;

/// Piecewise-linear unit discharge `q(t)` in m²/s, held constant outside its range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "HydrographRepr", into = "HydrographRepr")]
pub struct Hydrograph {
    points: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HydrographRepr {
    Constant(f64),
    Series(Vec<(f64, f64)>),
}

impl From<HydrographRepr> for Hydrograph {
    fn from(r: HydrographRepr) -> Self {
        match r {
            HydrographRepr::Constant(q) => Hydrograph::constant(q),
            HydrographRepr::Series(p) => Hydrograph { points: p },
        }
    }
}

impl From<Hydrograph> for HydrographRepr {
    fn from(h: Hydrograph) -> Self {
        match h.points.as_slice() {
            [(t, q)] if *t == 0.0 => HydrographRepr::Constant(*q),
            _ => HydrographRepr::Series(h.points),
        }
    }
}

impl Hydrograph {
    pub fn constant(q: f64) -> Self {
        Self { points: vec![(0.0, q)] }
    }

    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, SolverError> {
        if points.is_empty() {
            return Err(SolverError::Invalid("empty hydrograph".into()));
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(SolverError::Invalid("hydrograph times must increase".into()));
        }
        if points.iter().any(|&(t, q)| !(t.is_finite() && q.is_finite() && q >= 0.0)) {
            return Err(SolverError::Invalid("hydrograph values must be finite and q >= 0".into()));
        }
        Ok(Self { points })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { points: self.points.iter().map(|&(t, q)| (t, q * factor)).collect() }
    }

    pub fn at(&self, t: f64) -> f64 {
        let p = &self.points;
        if t <= p[0].0 {
            return p[0].1;
        }
        match p.iter().position(|&(ti, _)| ti > t) {
            None => p[p.len() - 1].1,
            Some(k) => {
                let (t0, q0) = p[k - 1];
                let (t1, q1) = p[k];
                q0 + (q1 - q0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum BoundaryCondition {
    #[default]
    Wall,
    FreeOutflow,
    /// Inflow of unit discharge `q` (m²/s) spread uniformly along the side.
    ImposedDischarge { q: Hydrograph },
    ImposedDepth { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    North,
    South,
    East,
    West,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct Boundaries {
    pub north: BoundaryCondition,
    pub south: BoundaryCondition,
    pub east: BoundaryCondition,
    pub west: BoundaryCondition,
}

impl Boundaries {
    pub fn walls() -> Self {
        Self::default()
    }

    pub fn side(&self, s: Side) -> &BoundaryCondition {
        match s {
            Side::North => &self.north,
            Side::South => &self.south,
            Side::East => &self.east,
            Side::West => &self.west,
        }
    }

    pub fn side_mut(&mut self, s: Side) -> &mut BoundaryCondition {
        match s {
            Side::North => &mut self.north,
            Side::South => &mut self.south,
            Side::East => &mut self.east,
            Side::West => &mut self.west,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Order {
    #[default]
    #[serde(rename = "1")]
    First,
    /// MUSCL-minmod in space, Heun in time.
    #[serde(rename = "2")]
    Second,
}

impl Order {
    /// Stable for the unsplit two-dimensional update at either order.
    pub fn default_cfl(self) -> f64 {
        0.5
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub flux: FluxScheme,
    pub order: Order,
    pub cfl: f64,
    pub g: f64,
    pub h_dry: f64,
    pub dt_max: f64,
    pub max_steps: u64,
    pub boundaries: Boundaries,
    /// Sampling interval of the volume series, seconds.
    pub mass_interval: f64,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(FluxScheme::Hll, Order::First)
    }
}

impl SolverConfig {
    pub fn new(flux: FluxScheme, order: Order) -> Self {
        Self {
            flux,
            order,
            cfl: order.default_cfl(),
            g: 9.81,
            h_dry: 1e-10,
            dt_max: 1.0,
            max_steps: 100_000_000,
            boundaries: Boundaries::walls(),
            mass_interval: 1.0,
            execution: Execution::Parallel,
        }
    }

    pub fn with_boundaries(mut self, b: Boundaries) -> Self {
        self.boundaries = b;
        self
    }

    pub fn with_execution(mut self, e: Execution) -> Self {
        self.execution = e;
        self
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::Invalid(m.to_string()));
        if !(self.cfl > 0.0 && self.cfl <= 1.0) {
            return bad("cfl must lie in (0, 1]");
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad("g must be positive");
        }
        if !(self.h_dry > 0.0 && self.h_dry.is_finite()) {
            return bad("h_dry must be positive");
        }
        if !(self.dt_max > 0.0 && self.dt_max.is_finite()) {
            return bad("dt_max must be positive");
        }
        if !(self.mass_interval > 0.0) {
            return bad("mass_interval must be positive");
        }
        for s in [Side::North, Side::South, Side::East, Side::West] {
            if let BoundaryCondition::ImposedDepth { h } = self.boundaries.side(s) {
                if !(*h >= 0.0 && h.is_finite()) {
                    return bad("imposed depth must be >= 0");
                }
            }
        }
        Ok(())
    }
}

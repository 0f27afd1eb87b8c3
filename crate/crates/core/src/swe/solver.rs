//! Finite-volume update: hydrostatic reconstruction at every interface,
//! HLL/Rusanov fluxes, optional MUSCL + Heun, split semi-implicit friction.

use serde::{Deserialize, Serialize};

use super::config::{BoundaryCondition, Hydrograph, Order, Side, SolverConfig};
use super::flux::{numerical_flux, CellState, Flux};
use super::friction::{friction_source, FrictionLaw, FrictionModel};
use super::reconstruct::{hydrostatic_reconstruction, muscl_reconstruct};
use super::state::{FlowState, Topography};
use crate::error::SolverError;
use crate::grid::Grid;
use crate::io::Raster;

/// Reconstructed value at one cell face.
#[derive(Debug, Clone, Copy)]
struct Face {
    h: f64,
    z: f64,
    u: f64,
    v: f64,
}

impl Face {
    /// State in interface-normal coordinates.
    #[inline]
    fn normal(self, y: bool) -> CellState {
        if y {
            CellState { h: self.h, u: self.v, v: self.u }
        } else {
            CellState { h: self.h, u: self.u, v: self.v }
        }
    }
}

/// Interface flux in normal coordinates plus the hydrostatic pressure
/// corrections received by the cell on each side.
#[derive(Debug, Clone, Copy)]
struct Iface {
    f: Flux,
    cl: f64,
    cr: f64,
}

struct Ctx<'a> {
    grid: Grid,
    z: &'a [f64],
    h: &'a [f64],
    u: &'a [f64],
    v: &'a [f64],
    cfg: &'a SolverConfig,
    t: f64,
}

impl Ctx<'_> {
    #[inline]
    fn centre(&self, i: usize) -> Face {
        Face { h: self.h[i], z: self.z[i], u: self.u[i], v: self.v[i] }
    }

    /// Faces of cell `i` towards `prev` and `next` along one axis.
    #[inline]
    fn faces(&self, i: usize, prev: Option<usize>, next: Option<usize>) -> (Face, Face) {
        match (self.cfg.order, prev, next) {
            (Order::Second, Some(p), Some(n)) => {
                let (h, u, v, z) = (self.h, self.u, self.v, self.z);
                let (h0, h1) = muscl_reconstruct(h[p], h[i], h[n]);
                let (e0, e1) = muscl_reconstruct(h[p] + z[p], h[i] + z[i], h[n] + z[n]);
                let (u0, u1) = muscl_reconstruct(u[p], u[i], u[n]);
                let (v0, v1) = muscl_reconstruct(v[p], v[i], v[n]);
                (Face { h: h0, z: e0 - h0, u: u0, v: v0 }, Face { h: h1, z: e1 - h1, u: u1, v: v1 })
            }
            _ => {
                let c = self.centre(i);
                (c, c)
            }
        }
    }

    /// (west, east) faces.
    #[inline]
    fn faces_x(&self, r: usize, c: usize) -> (Face, Face) {
        let i = self.grid.index(r, c);
        let prev = (c > 0).then(|| i - 1);
        let next = (c + 1 < self.grid.ncols).then(|| i + 1);
        self.faces(i, prev, next)
    }

    /// (south, north) faces. Row 0 is the northern row.
    #[inline]
    fn faces_y(&self, r: usize, c: usize) -> (Face, Face) {
        let i = self.grid.index(r, c);
        let south = (r + 1 < self.grid.nrows).then(|| i + self.grid.ncols);
        let north = (r > 0).then(|| i - self.grid.ncols);
        self.faces(i, south, north)
    }

    #[inline]
    fn interface(&self, l: Face, r: Face, y: bool) -> Iface {
        let g = self.cfg.g;
        let (ls, rs) = hydrostatic_reconstruction(l.normal(y), r.normal(y), l.z, r.z);
        let f = numerical_flux(ls, rs, self.cfg.flux, g);
        Iface { f, cl: 0.5 * g * (l.h * l.h - ls.h * ls.h), cr: 0.5 * g * (r.h * r.h - rs.h * rs.h) }
    }

    /// Interface on a domain side. `interior_left` is true on the east and
    /// north sides, where the domain lies on the low-coordinate side.
    fn boundary(&self, inner: Face, side: Side, y: bool, interior_left: bool) -> Iface {
        let ghost = |h: f64, un_sign: f64| {
            let n = inner.normal(y);
            let s = CellState { h, u: un_sign * n.u, v: n.v };
            // back to a cartesian face with the same bed elevation
            if y {
                Face { h: s.h, z: inner.z, u: s.v, v: s.u }
            } else {
                Face { h: s.h, z: inner.z, u: s.u, v: s.v }
            }
        };
        let pair = |gf: Face| {
            if interior_left {
                self.interface(inner, gf, y)
            } else {
                self.interface(gf, inner, y)
            }
        };
        match self.cfg.boundaries.side(side) {
            BoundaryCondition::Wall => pair(ghost(inner.h, -1.0)),
            BoundaryCondition::FreeOutflow => pair(inner),
            BoundaryCondition::ImposedDepth { h } => pair(ghost(*h, 1.0)),
            BoundaryCondition::ImposedDischarge { q } => {
                let q = q.at(self.t);
                if q <= 0.0 {
                    return pair(ghost(inner.h, -1.0));
                }
                let g = self.cfg.g;
                let hb = inner.h.max(inflow_depth(q, g));
                let mass = if interior_left { -q } else { q };
                Iface { f: [mass, q * q / hb + 0.5 * g * hb * hb, 0.0], cl: 0.0, cr: 0.0 }
            }
        }
    }

    /// Conserved variables of row `r` after one explicit Euler stage.
    fn row_update(&self, r: usize, dt: f64, out: &mut [[f64; 3]]) {
        let grid = self.grid;
        let n = grid.ncols;
        let dtdx = dt / grid.cellsize;
        let g = self.cfg.g;

        let fx: Vec<(Face, Face)> = (0..n).map(|c| self.faces_x(r, c)).collect();
        let mut xi = Vec::with_capacity(n + 1);
        xi.push(self.boundary(fx[0].0, Side::West, false, false));
        for c in 1..n {
            xi.push(self.interface(fx[c - 1].1, fx[c].0, false));
        }
        xi.push(self.boundary(fx[n - 1].1, Side::East, false, true));

        for c in 0..n {
            let i = grid.index(r, c);
            let (fs, fn_) = self.faces_y(r, c);
            let north = if r == 0 {
                self.boundary(fn_, Side::North, true, true)
            } else {
                self.interface(fn_, self.faces_y(r - 1, c).0, true)
            };
            let south = if r + 1 == grid.nrows {
                self.boundary(fs, Side::South, true, false)
            } else {
                self.interface(self.faces_y(r + 1, c).1, fs, true)
            };
            let (w, e) = (xi[c], xi[c + 1]);
            let (fw, fe) = fx[c];

            let h = self.h[i];
            let hu = h * self.u[i];
            let hv = h * self.v[i];
            let scx = -g * 0.5 * (fw.h + fe.h) * (fe.z - fw.z);
            let scy = -g * 0.5 * (fs.h + fn_.h) * (fn_.z - fs.z);

            out[c] = [
                h - dtdx * (e.f[0] - w.f[0]) - dtdx * (north.f[0] - south.f[0]),
                hu - dtdx * ((e.f[1] + e.cl) - (w.f[1] + w.cr)) - dtdx * (north.f[2] - south.f[2]) + dtdx * scx,
                hv - dtdx * (e.f[2] - w.f[2]) - dtdx * ((north.f[1] + north.cl) - (south.f[1] + south.cr))
                    + dtdx * scy,
            ];
        }
    }
}

/// Critical depth of an inflow of unit discharge `q`.
#[inline]
fn inflow_depth(q: f64, g: f64) -> f64 {
    (q * q / g).cbrt()
}

fn euler_stage(topo: &Topography, s: &FlowState, cfg: &SolverConfig, dt: f64) -> Vec<[f64; 3]> {
    let ctx = Ctx { grid: s.grid, z: &topo.z, h: &s.h, u: &s.u, v: &s.v, cfg, t: s.t };
    let mut out = vec![[0.0; 3]; s.grid.len()];
    cfg.execution.for_each_chunk_mut(&mut out, s.grid.ncols, |r, row| ctx.row_update(r, dt, row));
    out
}

fn check_finite(grid: &Grid, u: &[[f64; 3]], t: f64) -> Result<(), SolverError> {
    match u.iter().position(|c| !(c[0].is_finite() && c[1].is_finite() && c[2].is_finite())) {
        None => Ok(()),
        Some(i) => Err(SolverError::NonFinite { row: i / grid.ncols, col: i % grid.ncols, t }),
    }
}

fn to_primitive(grid: Grid, u: &[[f64; 3]], t: f64, h_dry: f64) -> FlowState {
    let n = u.len();
    let (mut h, mut uu, mut vv) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for c in u {
        let d = c[0].max(0.0);
        h.push(d);
        if d <= h_dry {
            uu.push(0.0);
            vv.push(0.0);
        } else {
            uu.push(c[1] / d);
            vv.push(c[2] / d);
        }
    }
    FlowState { grid, h, u: uu, v: vv, t }
}

fn apply_friction(s: &mut FlowState, friction: &FrictionModel, dt: f64, cfg: &SolverConfig) {
    if friction.law == FrictionLaw::None {
        return;
    }
    for i in 0..s.h.len() {
        if s.h[i] > cfg.h_dry {
            let (u, v) = friction_source(s.h[i], s.u[i], s.v[i], friction.law, friction.coefficient_at(i), dt, cfg.g);
            s.u[i] = u;
            s.v[i] = v;
        }
    }
}

/// Largest wave speed of the state, including inflow boundaries.
fn max_wave_speed(state: &FlowState, cfg: &SolverConfig) -> f64 {
    let g = cfg.g;
    let grid = state.grid;
    let n = grid.ncols;
    let row_max = cfg.execution.map_range(grid.nrows, |r| {
        let mut m = 0.0f64;
        for i in r * n..(r + 1) * n {
            let h = state.h[i];
            if h > cfg.h_dry {
                let c = (g * h).sqrt();
                m = m.max(state.u[i].abs() + c).max(state.v[i].abs() + c);
            }
        }
        m
    });
    let mut lambda = row_max.into_iter().fold(0.0f64, f64::max);

    for side in [Side::North, Side::South, Side::East, Side::West] {
        if let BoundaryCondition::ImposedDischarge { q } = cfg.boundaries.side(side) {
            let q = q.at(state.t);
            if q > 0.0 {
                let hc = inflow_depth(q, g);
                let cells: Box<dyn Iterator<Item = usize>> = match side {
                    Side::North => Box::new(0..n),
                    Side::South => Box::new((grid.nrows - 1) * n..grid.nrows * n),
                    Side::West => Box::new((0..grid.nrows).map(move |r| r * n)),
                    Side::East => Box::new((0..grid.nrows).map(move |r| r * n + n - 1)),
                };
                for i in cells {
                    let hb = state.h[i].max(hc);
                    lambda = lambda.max(q / hb + (g * hb).sqrt());
                }
            }
        }
    }
    lambda
}

/// CFL time step `cfl · cellsize / λ_max`, capped at `dt_max`; `dt_max` when
/// nothing moves.
pub fn stable_timestep(state: &FlowState, config: &SolverConfig) -> f64 {
    let lambda = max_wave_speed(state, config);
    if lambda > 0.0 {
        (config.cfl * state.grid.cellsize / lambda).min(config.dt_max)
    } else {
        config.dt_max
    }
}

/// Advances `state` by `dt`.
pub fn step(
    state: &FlowState,
    topo: &Topography,
    friction: &FrictionModel,
    config: &SolverConfig,
    dt: f64,
) -> Result<FlowState, SolverError> {
    let grid = state.grid;
    let t_new = state.t + dt;
    let mut next = match config.order {
        Order::First => {
            let u1 = euler_stage(topo, state, config, dt);
            check_finite(&grid, &u1, t_new)?;
            to_primitive(grid, &u1, t_new, config.h_dry)
        }
        Order::Second => {
            let u1 = euler_stage(topo, state, config, dt);
            check_finite(&grid, &u1, t_new)?;
            let s1 = to_primitive(grid, &u1, t_new, config.h_dry);
            drop(u1);
            let mut u2 = euler_stage(topo, &s1, config, dt);
            check_finite(&grid, &u2, t_new)?;
            for (i, c) in u2.iter_mut().enumerate() {
                let h0 = state.h[i];
                *c = [0.5 * (h0 + c[0]), 0.5 * (h0 * state.u[i] + c[1]), 0.5 * (h0 * state.v[i] + c[2])];
            }
            drop(s1);
            to_primitive(grid, &u2, t_new, config.h_dry)
        }
    };
    apply_friction(&mut next, friction, dt, config);
    Ok(next)
}

/// Time-varying inflow through one side, overriding that side's condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inflow {
    pub side: Side,
    pub hydrograph: Hydrograph,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationOutput {
    pub hmax: Raster,
    /// Running maximum of `h + z`.
    pub wse_max: Raster,
    pub final_state: FlowState,
    /// `(t, volume)` samples.
    pub mass_series: Vec<(f64, f64)>,
    pub dt_count: u64,
}

pub fn run_simulation(
    topo: &Topography,
    initial: &FlowState,
    friction: &FrictionModel,
    config: &SolverConfig,
    t_end: f64,
    inflow: Option<&Inflow>,
) -> Result<SimulationOutput, SolverError> {
    config.validate()?;
    friction.validate(topo.grid.len())?;
    if topo.grid != initial.grid {
        return Err(SolverError::Invalid("topography and initial state grids differ".into()));
    }
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(SolverError::Invalid(format!("t_end must be >= 0, got {t_end}")));
    }
    let cfg_owned;
    let cfg = match inflow {
        None => config,
        Some(inf) => {
            let mut c = config.clone();
            *c.boundaries.side_mut(inf.side) = BoundaryCondition::ImposedDischarge { q: inf.hydrograph.clone() };
            cfg_owned = c;
            &cfg_owned
        }
    };

    let grid = topo.grid;
    let mut state = FlowState::new(grid, initial.h.clone(), initial.u.clone(), initial.v.clone(), cfg.h_dry)?;
    state.t = 0.0;
    let mut hmax = state.h.clone();
    let mut wse: Vec<f64> = state.h.iter().zip(&topo.z).map(|(h, z)| h + z).collect();
    let mut series = vec![(0.0, state.volume())];
    let mut next_sample = cfg.mass_interval;
    let mut steps = 0u64;

    while state.t < t_end {
        if steps >= cfg.max_steps {
            return Err(SolverError::Timeout { cap: cfg.max_steps, t: state.t });
        }
        let mut dt = stable_timestep(&state, cfg);
        let remaining = t_end - state.t;
        if dt >= remaining || remaining - dt < 1e-12 * t_end {
            dt = remaining;
        }
        let mut next = step(&state, topo, friction, cfg, dt)?;
        if dt == remaining {
            next.t = t_end;
        }
        state = next;
        steps += 1;

        for i in 0..grid.len() {
            let h = state.h[i];
            if h > hmax[i] {
                hmax[i] = h;
            }
            let e = h + topo.z[i];
            if e > wse[i] {
                wse[i] = e;
            }
        }
        if state.t >= next_sample {
            series.push((state.t, state.volume()));
            while next_sample <= state.t {
                next_sample += cfg.mass_interval;
            }
        }
    }
    if series.last().map(|s| s.0) != Some(state.t) {
        series.push((state.t, state.volume()));
    }

    Ok(SimulationOutput {
        hmax: Raster::new(grid, hmax).expect("grid-sized field"),
        wse_max: Raster::new(grid, wse).expect("grid-sized field"),
        final_state: state,
        mass_series: series,
        dt_count: steps,
    })
}

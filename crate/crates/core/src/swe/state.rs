use crate::error::SolverError;
use crate::grid::Grid;
use crate::io::Raster;

use super::flux::CellState;

#[derive(Debug, Clone, PartialEq)]
pub struct Topography {
    pub grid: Grid,
    pub z: Vec<f64>,
}

impl Topography {
    pub fn new(grid: Grid, z: Vec<f64>) -> Result<Self, SolverError> {
        if z.len() != grid.len() {
            return Err(SolverError::Invalid(format!("topography has {} cells, grid {}", z.len(), grid.len())));
        }
        if let Some(i) = z.iter().position(|v| !v.is_finite()) {
            return Err(SolverError::Invalid(format!("non-finite bed elevation at cell {i}")));
        }
        Ok(Self { grid, z })
    }

    pub fn flat(grid: Grid, z: f64) -> Self {
        Self { grid, z: vec![z; grid.len()] }
    }

    pub fn from_raster(r: &Raster) -> Result<Self, SolverError> {
        if (0..r.values.len()).any(|i| r.is_nodata(i)) {
            return Err(SolverError::Invalid("topography contains NODATA cells".into()));
        }
        Self::new(r.grid, r.values.clone())
    }
}

/// Per-cell depth and velocities at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub grid: Grid,
    pub h: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl FlowState {
    /// Validates the fields and zeroes velocities in cells with `h <= h_dry`.
    pub fn new(grid: Grid, h: Vec<f64>, mut u: Vec<f64>, mut v: Vec<f64>, h_dry: f64) -> Result<Self, SolverError> {
        let n = grid.len();
        if h.len() != n || u.len() != n || v.len() != n {
            return Err(SolverError::Invalid("state field sizes do not match the grid".into()));
        }
        for i in 0..n {
            if !(h[i] >= 0.0 && h[i].is_finite() && u[i].is_finite() && v[i].is_finite()) {
                return Err(SolverError::Invalid(format!("invalid state in cell {i}")));
            }
            if h[i] <= h_dry {
                u[i] = 0.0;
                v[i] = 0.0;
            }
        }
        Ok(Self { grid, h, u, v, t: 0.0 })
    }

    pub fn dry(grid: Grid) -> Self {
        let n = grid.len();
        Self { grid, h: vec![0.0; n], u: vec![0.0; n], v: vec![0.0; n], t: 0.0 }
    }

    /// Still water with free surface `eta` over `topo`.
    pub fn lake_at_rest(topo: &Topography, eta: f64) -> Self {
        let n = topo.grid.len();
        let h = topo.z.iter().map(|&z| (eta - z).max(0.0)).collect();
        Self { grid: topo.grid, h, u: vec![0.0; n], v: vec![0.0; n], t: 0.0 }
    }

    #[inline]
    pub fn cell(&self, i: usize) -> CellState {
        CellState { h: self.h[i], u: self.u[i], v: self.v[i] }
    }

    /// Total water volume (m³). Summed row by row in a fixed order.
    pub fn volume(&self) -> f64 {
        let n = self.grid.ncols;
        let area = self.grid.cell_area();
        self.h.chunks(n).map(|row| row.iter().sum::<f64>()).sum::<f64>() * area
    }
}

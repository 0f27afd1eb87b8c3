use std::path::{Path, PathBuf};

use super::estimator::{estimate_prefix, PickFreezeOutputs};
use crate::error::{GsaError, IoError};
use crate::exec::Execution;
use crate::grid::Grid;
use crate::io::{write_ascii_grid, Raster, DEFAULT_NODATA};

/// Per-cell first- and total-order index rasters. Masked cells hold NODATA.
#[derive(Debug, Clone, PartialEq)]
pub struct SobolMap {
    pub grid: Grid,
    pub names: Vec<String>,
    pub first: Vec<Raster>,
    pub total: Vec<Raster>,
    /// `true` where the cell is masked: never wet, missing data or degenerate variance.
    pub mask: Vec<bool>,
}

/// Runs the estimators independently on every cell of `stack`, one raster per
/// model run in design order. `wet` marks cells wet in at least one run;
/// cells outside it are masked.
pub fn sobol_map(
    stack: &[Raster],
    n: usize,
    names: &[String],
    wet: Option<&[bool]>,
    exec: Execution,
) -> Result<SobolMap, GsaError> {
    let p = names.len();
    if stack.len() != n * (p + 2) {
        return Err(GsaError::InvalidDesign(format!("expected {} rasters, got {}", n * (p + 2), stack.len())));
    }
    let grid = stack[0].grid;
    if stack.iter().any(|r| r.grid != grid) || wet.is_some_and(|w| w.len() != grid.len()) {
        return Err(GsaError::GridMismatch);
    }
    PickFreezeOutputs::new(n, p, &vec![0.0; n * (p + 2)])?;

    let cells = exec.map_range(grid.len(), |c| {
        if wet.is_some_and(|w| !w[c]) {
            return None;
        }
        let mut y = Vec::with_capacity(stack.len());
        for r in stack {
            if r.is_nodata(c) || !r.values[c].is_finite() {
                return None;
            }
            y.push(r.values[c]);
        }
        let o = PickFreezeOutputs::new(n, p, &y).ok()?;
        estimate_prefix(&o, n).ok()
    });

    let mut first = vec![vec![DEFAULT_NODATA; grid.len()]; p];
    let mut total = vec![vec![DEFAULT_NODATA; grid.len()]; p];
    let mut mask = vec![true; grid.len()];
    for (c, est) in cells.into_iter().enumerate() {
        if let Some((f, t)) = est {
            mask[c] = false;
            for i in 0..p {
                first[i][c] = f[i];
                total[i][c] = t[i];
            }
        }
    }
    let raster = |v: Vec<f64>| Raster { grid, values: v, nodata: DEFAULT_NODATA };
    Ok(SobolMap {
        grid,
        names: names.to_vec(),
        first: first.into_iter().map(raster).collect(),
        total: total.into_iter().map(raster).collect(),
        mask,
    })
}

impl SobolMap {
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Writes `S1_<name>.asc` and `ST_<name>.asc` per parameter; returns the paths.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>, IoError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        let mut paths = Vec::new();
        for (i, name) in self.names.iter().enumerate() {
            for (tag, r) in [("S1", &self.first[i]), ("ST", &self.total[i])] {
                let path = dir.join(format!("{tag}_{name}.asc"));
                write_ascii_grid(r, &path)?;
                paths.push(path);
            }
        }
        Ok(paths)
    }
}

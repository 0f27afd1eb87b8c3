use std::collections::BTreeMap;

use serde::Serialize;

use super::config::{Role, Study, DEFAULT_ERROR_SIGMA};
use crate::error::CampaignError;
use crate::grid::Grid;
use crate::gsa::Distribution;
use crate::io::Raster;
use crate::rng::{derive_seed, UniformStream};
use crate::swe::{FrictionModel, Inflow, SolverConfig};

/// I.i.d. `N(0, sigma)` field. Row `r` draws from counter stream `r`, so rows
/// can be generated independently.
pub fn generate_error_grid(grid: Grid, sigma: f64, seed: u64) -> Raster {
    if sigma == 0.0 {
        return Raster::filled(grid, 0.0);
    }
    let normal = Distribution::Normal { mean: 0.0, std: sigma };
    let mut values = Vec::with_capacity(grid.len());
    for r in 0..grid.nrows {
        let mut s = UniformStream::new(seed, r as u64);
        values.extend((0..grid.ncols).map(|_| normal.quantile(s.next_open01())));
    }
    Raster { grid, values, nodata: crate::io::DEFAULT_NODATA }
}

/// Cellwise `dem + error`.
pub fn apply_error(dem: &Raster, error: &Raster) -> Result<Raster, CampaignError> {
    if dem.grid != error.grid {
        return Err(CampaignError::GridMismatch);
    }
    Ok(Raster { grid: dem.grid, values: dem.values.iter().zip(&error.values).map(|(z, e)| z + e).collect(), nodata: dem.nodata })
}

/// The registered DEM for `level`.
pub fn select_structure_level<'a>(level: &str, structures: &'a BTreeMap<String, Raster>) -> Result<&'a Raster, CampaignError> {
    structures.get(level).ok_or_else(|| CampaignError::MissingVariant(level.to_string()))
}

fn whole(x: f64) -> Option<usize> {
    let r = x.round();
    ((x - r).abs() <= 1e-9 * x.abs().max(1.0) && r >= 1.0).then_some(r as usize)
}

/// Grid of cell size `cellsize` over the same extent as `grid`.
pub fn coarsened_grid(grid: Grid, cellsize: f64) -> Result<Grid, CampaignError> {
    if !(cellsize >= grid.cellsize * (1.0 - 1e-12)) {
        return Err(CampaignError::IncompatibleExtent(format!(
            "target cell size {cellsize} is finer than source {}",
            grid.cellsize
        )));
    }
    let (nc, nr) = match (whole(grid.width() / cellsize), whole(grid.height() / cellsize)) {
        (Some(c), Some(r)) => (c, r),
        _ => {
            return Err(CampaignError::IncompatibleExtent(format!(
                "extent {} x {} is not a multiple of {cellsize}",
                grid.width(),
                grid.height()
            )))
        }
    };
    Ok(Grid::new(nc, nr, cellsize, grid.xll, grid.yll).map_err(crate::error::IoError::from)?)
}

/// Overlap weights along one axis: for each target cell, `(source index, fraction of source cell)`.
fn axis_weights(n_src: usize, n_dst: usize, ratio: f64) -> Vec<Vec<(usize, f64)>> {
    (0..n_dst)
        .map(|k| {
            let (a, b) = (k as f64 * ratio, (k + 1) as f64 * ratio);
            let lo = a.floor() as usize;
            let hi = (b.ceil() as usize).min(n_src);
            (lo..hi)
                .filter_map(|i| {
                    let w = (b.min((i + 1) as f64) - a.max(i as f64)).max(0.0);
                    (w > 1e-12).then_some((i, w))
                })
                .collect()
        })
        .collect()
}

/// Area-weighted block mean onto a coarser cell size over the same extent.
/// Source cells straddling a target boundary contribute by overlap area.
pub fn resample_dem(dem: &Raster, cellsize: f64) -> Result<Raster, CampaignError> {
    let src = dem.grid;
    let dst = coarsened_grid(src, cellsize)?;
    if dst.ncols == src.ncols && dst.nrows == src.nrows {
        return Ok(dem.clone());
    }
    if (0..dem.values.len()).any(|i| dem.is_nodata(i)) {
        return Err(CampaignError::Config("cannot resample a DEM containing NODATA".into()));
    }
    let ratio = cellsize / src.cellsize;
    let wc = axis_weights(src.ncols, dst.ncols, ratio);
    let wr = axis_weights(src.nrows, dst.nrows, ratio);
    let mut values = Vec::with_capacity(dst.len());
    for rows in &wr {
        for cols in &wc {
            let (mut s, mut w) = (0.0, 0.0);
            for &(r, a) in rows {
                let row = dem.row(r);
                for &(c, b) in cols {
                    s += a * b * row[c];
                    w += a * b;
                }
            }
            values.push(s / w);
        }
    }
    Ok(Raster { grid: dst, values, nodata: dem.nodata })
}

/// Per target cell maximum over the source cells whose centres fall inside it.
/// `dst` must cover the same extent with cells at least as large.
pub fn block_max(src: &Raster, dst: Grid) -> Raster {
    let mut out = vec![f64::NEG_INFINITY; dst.len()];
    let g = src.grid;
    for r in 0..g.nrows {
        for c in 0..g.ncols {
            let v = src.values[g.index(r, c)];
            if src.is_nodata(g.index(r, c)) {
                continue;
            }
            let (x, y) = g.cell_center(r, c);
            if let Some((dr, dc)) = dst.locate(x, y) {
                let k = dst.index(dr, dc);
                if v > out[k] {
                    out[k] = v;
                }
            }
        }
    }
    let nodata = src.nodata;
    Raster { grid: dst, values: out.into_iter().map(|v| if v == f64::NEG_INFINITY { nodata } else { v }).collect(), nodata }
}

/// Concrete inputs of one model run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub run_id: usize,
    /// Design row, one value per parameter.
    pub values: Vec<f64>,
    pub dem: Raster,
    pub friction: FrictionModel,
    pub inflow: Option<Inflow>,
    pub solver: SolverConfig,
    pub t_end: f64,
    pub initial_wse: Option<f64>,
}

#[derive(Serialize)]
struct Fingerprint<'a> {
    grid: &'a Grid,
    friction: &'a FrictionModel,
    inflow: &'a Option<Inflow>,
    solver: &'a SolverConfig,
    t_end: f64,
    initial_wse: Option<f64>,
}

impl Scenario {
    /// Hash of everything that determines the run's outputs (not the run id).
    pub fn checksum(&self) -> String {
        let mut h = blake3::Hasher::new();
        let fp = Fingerprint {
            grid: &self.dem.grid,
            friction: &self.friction,
            inflow: &self.inflow,
            solver: &self.solver,
            t_end: self.t_end,
            initial_wse: self.initial_wse,
        };
        h.update(serde_json::to_string(&fp).expect("serializable").as_bytes());
        for v in &self.dem.values {
            h.update(&v.to_bits().to_le_bytes());
        }
        h.finalize().to_hex().to_string()
    }
}

/// Seed of the error field selected by design value `value`.
pub fn error_seed(study_seed: u64, value: f64) -> u64 {
    derive_seed(&[study_seed, 0x45_52_52, value.to_bits()])
}

/// Structure level, then error field, then resampling, for one design row.
pub fn realize_scenario(study: &Study, run_id: usize, row: &[f64]) -> Result<Scenario, CampaignError> {
    let cfg = &study.config;
    if row.len() != cfg.parameters.len() {
        return Err(CampaignError::Config(format!("row has {} values for {} parameters", row.len(), cfg.parameters.len())));
    }
    let params = cfg.input_parameters();
    let value = |role: Role| cfg.parameter(role).map(|(i, _)| row[i]);

    let level = match cfg.parameter(Role::Structure) {
        Some((i, _)) => params[i].distribution.display(row[i]),
        None => cfg.base_level(),
    };
    let base = select_structure_level(&level, &study.structures)?;

    let dem = match cfg.parameter(Role::ErrorGrid) {
        Some((i, def)) => {
            let sigma = def.sigma.unwrap_or(DEFAULT_ERROR_SIGMA);
            let e = generate_error_grid(base.grid, sigma, error_seed(cfg.campaign.seed, row[i]));
            apply_error(base, &e)?
        }
        None => base.clone(),
    };
    let dem = match value(Role::Resolution) {
        Some(res) => resample_dem(&dem, res)?,
        None => dem,
    };

    let friction = study.friction(value(Role::Manning));
    let inflow = cfg.scenario.inflow.as_ref().map(|inf| match value(Role::Discharge) {
        Some(k) => Inflow { side: inf.side, hydrograph: inf.hydrograph.scaled(k) },
        None => inf.clone(),
    });
    let mut solver = cfg.scenario.solver.clone();
    solver.execution = crate::Execution::Sequential;
    Ok(Scenario {
        run_id,
        values: row.to_vec(),
        dem,
        friction,
        inflow,
        solver,
        t_end: cfg.scenario.t_end,
        initial_wse: cfg.scenario.initial_wse,
    })
}

/// Grid shared by per-cell outputs of all runs: the coarsest declared resolution.
pub fn common_grid(study: &Study) -> Result<Grid, CampaignError> {
    let src = study.source_grid();
    match study.config.resolutions().into_iter().fold(None, |m: Option<f64>, r| Some(m.map_or(r, |m| m.max(r)))) {
        Some(res) => coarsened_grid(src, res),
        None => Ok(src),
    }
}

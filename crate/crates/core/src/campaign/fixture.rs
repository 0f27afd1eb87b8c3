//! Synthetic valley used in examples and tests: a channel running north to
//! south with a floodplain, and a second DEM variant adding buildings.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use super::config::{CampaignSection, ParameterDef, Role, ScenarioSection, Study, StudyConfig};
use super::probe::{Probe, ProbeKind, Region};
use crate::error::{CampaignError, IoError};
use crate::grid::Grid;
use crate::gsa::Distribution;
use crate::io::{write_ascii_grid, Raster};
use crate::swe::{BoundaryCondition, FrictionModel, Hydrograph, Inflow, Side, SolverConfig};

pub const BUILDING_HEIGHT: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct Valley {
    /// Raw terrain.
    pub s1: Raster,
    /// Terrain plus buildings.
    pub s2: Raster,
    pub footprints: Vec<bool>,
}

/// Bed elevation at distance `d` from the north edge and `s` from the valley axis.
fn terrain(d: f64, height: f64, s: f64) -> f64 {
    let along = 0.01 * (height - d);
    let cross = if s < 8.0 { -1.0 + 0.5 * (s / 8.0).powi(2) } else { -0.5 + 0.04 * (s - 8.0) };
    along + cross
}

/// Buildings: 6 m x 8 m blocks on both banks every 25 m along the valley.
fn is_building(d: f64, s: f64) -> bool {
    let phase = d.rem_euclid(25.0);
    (12.0..18.0).contains(&s) && (8.0..16.0).contains(&phase)
}

pub fn synthetic_valley(ncols: usize, nrows: usize, cellsize: f64) -> Valley {
    let grid = Grid::new(ncols, nrows, cellsize, 0.0, 0.0).expect("valid valley grid");
    let (w, h) = (grid.width(), grid.height());
    let geom = |r: usize, c: usize| {
        let (x, y) = grid.cell_center(r, c);
        (h - y, (x - 0.5 * w).abs())
    };
    let s1 = Raster::from_fn(grid, |r, c| {
        let (d, s) = geom(r, c);
        terrain(d, h, s)
    });
    let mut footprints = vec![false; grid.len()];
    let mut s2 = s1.clone();
    for r in 0..nrows {
        for c in 0..ncols {
            let (d, s) = geom(r, c);
            if is_building(d, s) {
                let i = grid.index(r, c);
                footprints[i] = true;
                s2.values[i] += BUILDING_HEIGHT;
            }
        }
    }
    Valley { s1, s2, footprints }
}

/// Knobs of the valley study.
#[derive(Debug, Clone)]
pub struct ValleyStudy {
    pub ncols: usize,
    pub nrows: usize,
    pub n: usize,
    pub seed: u64,
    pub resolutions: Vec<f64>,
    pub sigma: f64,
    pub t_end: f64,
    /// Unit inflow across the north edge, m²/s.
    pub q: f64,
    pub max_workers: usize,
}

impl Default for ValleyStudy {
    fn default() -> Self {
        Self { ncols: 100, nrows: 150, n: 64, seed: 2024, resolutions: vec![1.0, 2.0, 5.0], sigma: 0.2, t_end: 150.0, q: 0.3, max_workers: 8 }
    }
}

impl ValleyStudy {
    /// Error grid, structure level and resolution as sampled parameters, one
    /// gauge, one area probe over the town and a full map.
    pub fn config(&self) -> StudyConfig {
        let mut solver = SolverConfig::default();
        solver.boundaries.south = BoundaryCondition::FreeOutflow;
        let (w, h) = (self.ncols as f64, self.nrows as f64);
        StudyConfig {
            campaign: CampaignSection { n: self.n, seed: self.seed, max_workers: self.max_workers, retries: 1 },
            structures: BTreeMap::from([("S1".to_string(), PathBuf::from("valley_s1.asc")), ("S2".to_string(), PathBuf::from("valley_s2.asc"))]),
            parameters: vec![
                ParameterDef { name: "E".into(), role: Role::ErrorGrid, distribution: None, sigma: Some(self.sigma), pool: None },
                ParameterDef { name: "S".into(), role: Role::Structure, distribution: None, sigma: None, pool: None },
                ParameterDef {
                    name: "R".into(),
                    role: Role::Resolution,
                    distribution: Some(Distribution::DiscreteUniform { values: self.resolutions.clone() }),
                    sigma: None,
                    pool: None,
                },
            ],
            scenario: ScenarioSection {
                t_end: self.t_end,
                solver,
                friction: FrictionModel::manning(0.035),
                inflow: Some(Inflow { side: Side::North, hydrograph: Hydrograph::constant(self.q) }),
                initial_wse: None,
                wet_threshold: 1e-3,
                base_level: None,
            },
            probes: vec![
                Probe::new("gauge", ProbeKind::Point { x: 0.5 * w, y: 0.5 * h }),
                Probe::new("town_max", ProbeKind::AreaMax { region: Region::Rect([0.5 * w - 20.0, 0.2 * h, 0.5 * w + 20.0, 0.6 * h]) }),
                Probe::new("flood", ProbeKind::FullMap),
            ],
        }
    }

    /// Writes both DEMs and `study.toml` into `dir`; returns the config path.
    pub fn write(&self, dir: impl AsRef<Path>) -> Result<PathBuf, CampaignError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        let v = synthetic_valley(self.ncols, self.nrows, 1.0);
        write_ascii_grid(&v.s1, dir.join("valley_s1.asc"))?;
        write_ascii_grid(&v.s2, dir.join("valley_s2.asc"))?;
        let path = dir.join("study.toml");
        std::fs::write(&path, self.config().to_toml()).map_err(|e| IoError::io(&path, e))?;
        Ok(path)
    }

    /// The study with DEMs built in memory.
    pub fn study(&self) -> Result<Study, CampaignError> {
        let v = synthetic_valley(self.ncols, self.nrows, 1.0);
        Study::new(self.config(), BTreeMap::from([("S1".to_string(), v.s1), ("S2".to_string(), v.s2)]))
    }
}

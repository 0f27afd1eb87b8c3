use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::probe::Probe;
use crate::error::{CampaignError, IoError};
use crate::gsa::{validate_parameters, Distribution, InputParameter};
use crate::io::{read_ascii_grid, Raster};
use crate::swe::{FrictionLaw, FrictionModel, Inflow, SolverConfig};

pub const DEFAULT_MAX_WORKERS: usize = 30;
pub const DEFAULT_ERROR_SIGMA: f64 = 0.2;

/// How a sampled value feeds the scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    /// Selects one realization of the DEM error field.
    ErrorGrid,
    /// Selects a registered DEM variant by label.
    Structure,
    /// Target cell size in metres.
    Resolution,
    /// Uniform friction coefficient under the scenario's friction law.
    Manning,
    /// Multiplier on the inflow hydrograph.
    Discharge,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterDef {
    pub name: String,
    pub role: Role,
    /// Required for manning, discharge and resolution; derived for error_grid
    /// and defaults to all registered levels for structure.
    #[serde(default)]
    pub distribution: Option<Distribution>,
    /// Per-cell standard deviation of the error field (error_grid only).
    #[serde(default)]
    pub sigma: Option<f64>,
    /// Size of a finite pool of error fields; absent means one field per draw.
    #[serde(default)]
    pub pool: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignSection {
    pub n: usize,
    pub seed: u64,
    #[serde(default = "default_workers")]
    pub max_workers: usize,
    /// Extra attempts for failed runs; numerical blow-ups are never retried.
    #[serde(default = "default_retries")]
    pub retries: usize,
}

fn default_workers() -> usize {
    DEFAULT_MAX_WORKERS
}

fn default_retries() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub t_end: f64,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub friction: FrictionModel,
    #[serde(default)]
    pub inflow: Option<Inflow>,
    /// Initial lake level; the domain starts dry when absent.
    #[serde(default)]
    pub initial_wse: Option<f64>,
    /// Depth above which a cell counts as wet for map masking, metres.
    #[serde(default = "default_wet_threshold")]
    pub wet_threshold: f64,
    /// Level used when no parameter has the structure role.
    #[serde(default)]
    pub base_level: Option<String>,
}

fn default_wet_threshold() -> f64 {
    1e-3
}

/// Study configuration as written in the TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub campaign: CampaignSection,
    /// Structure level label to DEM path, relative to the config file.
    pub structures: BTreeMap<String, PathBuf>,
    pub parameters: Vec<ParameterDef>,
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub probes: Vec<Probe>,
}

impl StudyConfig {
    pub fn from_toml(text: &str) -> Result<Self, CampaignError> {
        let c: Self = toml::from_str(text).map_err(|e| CampaignError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CampaignError> {
        let bad = |m: String| Err(CampaignError::Config(m));
        if self.campaign.max_workers == 0 {
            return bad("campaign.max_workers must be >= 1".into());
        }
        if self.campaign.n < 2 {
            return bad("campaign.n must be >= 2".into());
        }
        if self.structures.is_empty() {
            return bad("structures: at least one DEM must be registered".into());
        }
        if !(self.scenario.t_end >= 0.0 && self.scenario.t_end.is_finite()) {
            return bad("scenario.t_end must be >= 0".into());
        }
        self.scenario.solver.validate().map_err(|e| CampaignError::Config(format!("scenario.solver: {e}")))?;
        let mut seen = BTreeMap::new();
        for p in &self.parameters {
            if let Some(prev) = seen.insert(p.role, &p.name) {
                return bad(format!("parameters `{prev}` and `{}` share role {:?}", p.name, p.role));
            }
            if (p.sigma.is_some() || p.pool.is_some()) && p.role != Role::ErrorGrid {
                return bad(format!("parameters.{}: sigma/pool apply to error_grid only", p.name));
            }
            match p.role {
                Role::ErrorGrid => {
                    if p.distribution.is_some() {
                        return bad(format!("parameters.{}: error_grid takes sigma/pool, not a distribution", p.name));
                    }
                    if !p.sigma.unwrap_or(DEFAULT_ERROR_SIGMA).is_finite() || p.sigma.unwrap_or(0.0) < 0.0 {
                        return bad(format!("parameters.{}: sigma must be >= 0", p.name));
                    }
                    if p.pool == Some(0) {
                        return bad(format!("parameters.{}: pool must be >= 1", p.name));
                    }
                }
                Role::Structure => {
                    if let Some(d) = &p.distribution {
                        if !matches!(d, Distribution::Categorical { .. }) {
                            return bad(format!("parameters.{}: structure needs a categorical distribution", p.name));
                        }
                    }
                }
                Role::Resolution => match &p.distribution {
                    Some(Distribution::DiscreteUniform { values }) if values.iter().all(|v| *v > 0.0) => {}
                    _ => return bad(format!("parameters.{}: resolution needs discrete_uniform positive values", p.name)),
                },
                Role::Manning | Role::Discharge => {
                    if p.distribution.is_none() {
                        return bad(format!("parameters.{}: distribution required", p.name));
                    }
                    if p.role == Role::Discharge && self.scenario.inflow.is_none() {
                        return bad(format!("parameters.{}: discharge role needs scenario.inflow", p.name));
                    }
                }
            }
        }
        if !self.parameters.iter().any(|p| p.role == Role::Structure) {
            let base = self.base_level();
            if !self.structures.contains_key(&base) {
                return bad(format!("scenario.base_level `{base}` is not a registered structure"));
            }
        }
        let mut names = BTreeMap::new();
        for p in &self.probes {
            if names.insert(p.name.clone(), ()).is_some() {
                return bad(format!("probes: duplicate name `{}`", p.name));
            }
        }
        validate_parameters(&self.input_parameters()).map_err(|e| CampaignError::Config(e.to_string()))?;
        Ok(())
    }

    /// Level used when structure is not a sampled parameter.
    pub fn base_level(&self) -> String {
        self.scenario
            .base_level
            .clone()
            .unwrap_or_else(|| self.structures.keys().next().cloned().unwrap_or_default())
    }

    /// Parameters as sampled by the design, in declaration order.
    pub fn input_parameters(&self) -> Vec<InputParameter> {
        self.parameters
            .iter()
            .map(|p| {
                let d = match p.role {
                    Role::ErrorGrid => match p.pool {
                        Some(k) => Distribution::DiscreteUniform { values: (0..k).map(|i| i as f64).collect() },
                        None => Distribution::Uniform { low: 0.0, high: 1.0 },
                    },
                    Role::Structure => p.distribution.clone().unwrap_or_else(|| Distribution::Categorical {
                        labels: self.structures.keys().cloned().collect(),
                    }),
                    _ => p.distribution.clone().expect("validated"),
                };
                InputParameter::new(p.name.clone(), d)
            })
            .collect()
    }

    pub fn parameter(&self, role: Role) -> Option<(usize, &ParameterDef)> {
        self.parameters.iter().enumerate().find(|(_, p)| p.role == role)
    }

    /// Cell sizes a run may use: the declared resolutions, or none when the
    /// source resolution is kept.
    pub fn resolutions(&self) -> Vec<f64> {
        match self.parameter(Role::Resolution).and_then(|(_, p)| p.distribution.as_ref()) {
            Some(Distribution::DiscreteUniform { values }) => values.clone(),
            _ => Vec::new(),
        }
    }

    pub fn friction_law(&self) -> FrictionLaw {
        match self.scenario.friction.law {
            FrictionLaw::None => FrictionLaw::Manning,
            l => l,
        }
    }
}

/// A configuration together with its loaded DEM variants.
#[derive(Debug, Clone)]
pub struct Study {
    pub config: StudyConfig,
    pub structures: BTreeMap<String, Raster>,
}

impl Study {
    /// Reads the TOML file and every registered DEM; DEM paths are relative to the file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, CampaignError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| CampaignError::Io(IoError::io(path, e)))?;
        let config = StudyConfig::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let mut structures = BTreeMap::new();
        for (level, p) in &config.structures {
            let full = base.join(p);
            if !full.exists() {
                return Err(CampaignError::Config(format!("structures.{level}: DEM file {} not found", full.display())));
            }
            structures.insert(level.clone(), read_ascii_grid(&full)?);
        }
        Self::new(config, structures)
    }

    pub fn new(config: StudyConfig, structures: BTreeMap<String, Raster>) -> Result<Self, CampaignError> {
        config.validate()?;
        let mut grids = structures.values().map(|r| r.grid);
        let first = grids.next().ok_or_else(|| CampaignError::Config("no DEM loaded".into()))?;
        if grids.any(|g| g != first) {
            return Err(CampaignError::GridMismatch);
        }
        for (level, r) in &structures {
            if (0..r.values.len()).any(|i| r.is_nodata(i) || !r.values[i].is_finite()) {
                return Err(CampaignError::Config(format!("structures.{level}: DEM contains NODATA or non-finite cells")));
            }
        }
        for &res in &config.resolutions() {
            if res < first.cellsize * (1.0 - 1e-9) {
                return Err(CampaignError::Config(format!("resolution {res} is finer than the DEM cell size {}", first.cellsize)));
            }
        }
        Ok(Self { config, structures })
    }

    pub fn source_grid(&self) -> crate::Grid {
        self.structures.values().next().expect("validated").grid
    }

    /// Manning-type friction for a given coefficient under the configured law.
    pub fn friction(&self, coefficient: Option<f64>) -> FrictionModel {
        match coefficient {
            Some(c) => FrictionModel { law: self.config.friction_law(), coefficient: crate::swe::Coefficient::Uniform(c) },
            None => self.config.scenario.friction.clone(),
        }
    }
}

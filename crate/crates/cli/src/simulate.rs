use std::path::{Path, PathBuf};

use serde::Deserialize;
use swegsa::io::{fmt_f64, read_ascii_grid, write_ascii_grid, write_csv, Table};
use swegsa::swe::{run_simulation, FlowState, FrictionModel, Inflow, SolverConfig, Topography};

use crate::error::{self, CliError};

/// Single-simulation configuration; paths are relative to the file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulationConfig {
    dem: PathBuf,
    t_end: f64,
    /// Initial lake level over the whole domain.
    #[serde(default)]
    initial_wse: Option<f64>,
    /// Initial depth raster on the DEM grid.
    #[serde(default)]
    initial_depth: Option<PathBuf>,
    #[serde(default)]
    solver: SolverConfig,
    #[serde(default)]
    friction: FrictionModel,
    #[serde(default)]
    inflow: Option<Inflow>,
}

fn existing(base: &Path, key: &str, p: &Path) -> Result<PathBuf, CliError> {
    let full = base.join(p);
    if !full.exists() {
        return Err(CliError::config(format!("{key}: file {} not found", full.display())));
    }
    Ok(full)
}

pub fn simulate(config: &Path, out: &Path) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config).map_err(|e| CliError::config(format!("{}: {e}", config.display())))?;
    let cfg: SimulationConfig = toml::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", config.display())))?;
    let base = config.parent().unwrap_or(Path::new("."));
    let dem = read_ascii_grid(existing(base, "dem", &cfg.dem)?).map_err(|e| CliError::config(format!("dem: {e}")))?;
    let topo = Topography::from_raster(&dem).map_err(|e| CliError::config(format!("dem: {e}")))?;
    let init = match (cfg.initial_wse, &cfg.initial_depth) {
        (Some(_), Some(_)) => return Err(CliError::config("initial_wse and initial_depth are mutually exclusive")),
        (Some(eta), None) => FlowState::lake_at_rest(&topo, eta),
        (None, Some(p)) => {
            let h = read_ascii_grid(existing(base, "initial_depth", p)?).map_err(|e| CliError::config(format!("initial_depth: {e}")))?;
            if h.grid != topo.grid {
                return Err(CliError::config("initial_depth: grid differs from dem"));
            }
            let n = h.values.len();
            FlowState::new(topo.grid, h.values, vec![0.0; n], vec![0.0; n], cfg.solver.h_dry)
                .map_err(|e| CliError::config(format!("initial_depth: {e}")))?
        }
        (None, None) => FlowState::dry(topo.grid),
    };
    cfg.solver.validate().map_err(|e| CliError::config(format!("solver: {e}")))?;
    let sim = run_simulation(&topo, &init, &cfg.friction, &cfg.solver, cfg.t_end, cfg.inflow.as_ref())?;

    std::fs::create_dir_all(out).map_err(|e| CliError::Other(format!("{}: {e}", out.display())))?;
    write_ascii_grid(&sim.wse_max, out.join("wse_max.asc")).map_err(error::output)?;
    write_ascii_grid(&sim.hmax, out.join("hmax.asc")).map_err(error::output)?;
    let mut t = Table::new(["t", "volume"]);
    for (time, vol) in &sim.mass_series {
        t.push(vec![fmt_f64(*time), fmt_f64(*vol)]);
    }
    write_csv(&t, out.join("mass.csv")).map_err(error::output)?;
    println!("{} steps to t = {}", sim.dt_count, sim.final_state.t);
    Ok(())
}

//! Scenario generation, output extraction and resumable parallel execution
//! of simulation ensembles.

mod config;
pub mod fixture;
mod probe;
mod runner;
mod scenario;
mod store;

pub use config::{CampaignSection, ParameterDef, Role, ScenarioSection, Study, StudyConfig, DEFAULT_ERROR_SIGMA, DEFAULT_MAX_WORKERS};
pub use probe::{bilinear, extract_output, validate_probe, Probe, ProbeKind, ProbeValue, Region};
pub use runner::{load_map_stack, results_table, run_campaign, simulate, CampaignReport, RunOptions};
pub use scenario::{
    apply_error, block_max, coarsened_grid, common_grid, error_seed, generate_error_grid, realize_scenario, resample_dem,
    select_structure_level, Scenario,
};
pub use store::{latest_records, read_map, read_records, OutputValue, RecordStore, RunRecord, Status, MAPS_DIR, RECORDS_FILE, RESULTS_FILE};

//! Two-dimensional shallow-water solver on a regular Cartesian mesh.
//!
//! Conservative form with bed-slope and friction sources; the bed term is
//! discretised through hydrostatic reconstruction so that a lake at rest is
//! an exact fixed point of the update.

mod config;
mod flux;
mod friction;
mod reconstruct;
mod solver;
mod state;

pub use config::{BoundaryCondition, Boundaries, Hydrograph, Order, Side, SolverConfig};
pub use flux::{numerical_flux, physical_flux, physical_flux_y, CellState, Flux, FluxScheme};
pub use friction::{friction_source, Coefficient, FrictionLaw, FrictionModel};
pub use reconstruct::{hydrostatic_reconstruction, minmod, muscl_reconstruct};
pub use solver::{run_simulation, stable_timestep, step, Inflow, SimulationOutput};
pub use state::{FlowState, Topography};

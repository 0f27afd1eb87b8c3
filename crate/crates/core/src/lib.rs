//! Ensembles of 2D shallow-water flood simulations under uncertain inputs and
//! variance-based (Sobol) sensitivity analysis of their outputs.
//!
//! - [`swe`]: well-balanced finite-volume shallow-water solver.
//! - [`gsa`]: input distributions, pick-freeze designs, Sobol estimators and maps.
//! - [`campaign`]: scenario generation and resumable parallel execution.
//! - [`io`]: ESRI ASCII grids and CSV tables.

pub mod campaign;
pub mod error;
pub mod exec;
pub mod grid;
pub mod gsa;
pub mod io;
pub mod rng;
pub mod swe;

pub use exec::Execution;
pub use grid::Grid;
pub use io::Raster;

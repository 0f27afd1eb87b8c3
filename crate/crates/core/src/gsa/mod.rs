//! Variance-based global sensitivity analysis.

mod convergence;
mod describe;
mod design;
mod distribution;
mod estimator;
mod map;

pub use convergence::{convergence_series, default_checkpoints, sobol_convergence, Checkpoint, ConvergenceSeries, Z95};
pub use describe::{histogram, pearson, scatter, Histogram};
pub use design::{sample, Block, SampleDesign};
pub use distribution::{validate_parameters, Distribution, InputParameter};
pub use estimator::{
    analyze, bootstrap_ci, clamp_index, estimate_first_order, estimate_total_order, variance_floor, BootstrapOptions,
    IndexEstimate, Interval, ParameterIndices, PickFreezeOutputs, SobolResult, REPORT_RANGE, SOBOL_TABLE_COLUMNS,
};
pub use map::{sobol_map, SobolMap};

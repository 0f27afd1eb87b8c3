use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum GridError {
    #[error("grid must have at least one row and column (got {ncols}x{nrows})")]
    Empty { ncols: usize, nrows: usize },
    #[error("cell size must be positive and finite (got {0})")]
    BadCellsize(f64),
    #[error("grid origin must be finite")]
    BadOrigin,
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing header key `{0}`")]
    HeaderMismatch(&'static str),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error("raster has {got} values, grid needs {expected}")]
    ValueCount { expected: usize, got: usize },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl IoError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        IoError::Io { path: path.into(), source }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("non-finite value in cell (row {row}, col {col}) at t = {t}")]
    NonFinite { row: usize, col: usize, t: f64 },
    #[error("step cap of {cap} reached at t = {t} (time step collapse)")]
    Timeout { cap: u64, t: f64 },
    #[error("invalid solver input: {0}")]
    Invalid(String),
}

#[derive(Debug, Error, PartialEq)]
pub enum GsaError {
    #[error("invalid distribution for `{name}`: {msg}")]
    InvalidDistribution { name: String, msg: String },
    #[error("output variance {var:e} below floor {floor:e}; indices undefined")]
    DegenerateVariance { var: f64, floor: f64 },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("output rasters do not share a grid")]
    GridMismatch,
}

#[derive(Debug, Error)]
pub enum CampaignError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("structure level `{0}` has no registered DEM")]
    MissingVariant(String),
    #[error("incompatible extent: {0}")]
    IncompatibleExtent(String),
    #[error("rasters do not share a grid")]
    GridMismatch,
    #[error("probe `{0}` lies outside the domain")]
    OutOfDomain(String),
    #[error("record store: {0}")]
    Store(String),
    #[error("{} run(s) not completed: {failed:?}", failed.len())]
    Incomplete { failed: Vec<usize> },
    #[error("campaign interrupted after {completed} completed run(s)")]
    Interrupted { completed: usize },
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Gsa(#[from] GsaError),
}

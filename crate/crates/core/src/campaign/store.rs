use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CampaignError, IoError};
use crate::io::{read_ascii_grid, write_ascii_grid, Raster};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pending,
    Running,
    Done,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OutputValue {
    Scalar(f64),
    /// Map file stem relative to the store, e.g. `maps/flood/run_000012`.
    Map(String),
}

/// One line of the record log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run_id: usize,
    pub status: Status,
    pub checksum: String,
    pub attempt: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub outputs: BTreeMap<String, OutputValue>,
    #[serde(default)]
    pub wall_time_s: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub const RECORDS_FILE: &str = "records.jsonl";
pub const RESULTS_FILE: &str = "results.csv";
pub const MAPS_DIR: &str = "maps";

/// Append-only run log plus map files under one directory.
pub struct RecordStore {
    dir: PathBuf,
    log: File,
}

impl RecordStore {
    /// Opens or creates the store; existing records are kept.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, CampaignError> {
        let dir = dir.as_ref().to_path_buf();
        std::fs::create_dir_all(&dir).map_err(|e| IoError::io(&dir, e))?;
        let path = dir.join(RECORDS_FILE);
        let mut log = OpenOptions::new().create(true).append(true).open(&path).map_err(|e| IoError::io(&path, e))?;
        // terminate a torn final line so new records start on their own line
        let text = std::fs::read(&path).map_err(|e| IoError::io(&path, e))?;
        if text.last().is_some_and(|&b| b != b'\n') {
            log.write_all(b"\n").map_err(|e| IoError::io(&path, e))?;
        }
        Ok(Self { dir, log })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Appends one record and flushes it to disk.
    pub fn append(&mut self, rec: &RunRecord) -> Result<(), CampaignError> {
        let mut line = serde_json::to_string(rec).map_err(|e| CampaignError::Store(e.to_string()))?;
        line.push('\n');
        let path = self.dir.join(RECORDS_FILE);
        self.log.write_all(line.as_bytes()).map_err(|e| IoError::io(&path, e))?;
        self.log.sync_data().map_err(|e| IoError::io(&path, e))?;
        Ok(())
    }

    pub fn map_stem(probe: &str, run_id: usize) -> String {
        format!("{MAPS_DIR}/{probe}/run_{run_id:06}")
    }

    pub fn write_map(&self, stem: &str, wse_max: &Raster, hmax: &Raster) -> Result<(), CampaignError> {
        let base = self.dir.join(stem);
        if let Some(parent) = base.parent() {
            std::fs::create_dir_all(parent).map_err(|e| IoError::io(parent, e))?;
        }
        write_ascii_grid(wse_max, base.with_extension("wse.asc"))?;
        write_ascii_grid(hmax, base.with_extension("hmax.asc"))?;
        Ok(())
    }

    pub fn has_map(&self, stem: &str) -> bool {
        let base = self.dir.join(stem);
        base.with_extension("wse.asc").exists() && base.with_extension("hmax.asc").exists()
    }
}

/// `(wse_max, hmax)` rasters of a stored map output.
pub fn read_map(store_dir: impl AsRef<Path>, stem: &str) -> Result<(Raster, Raster), CampaignError> {
    let base = store_dir.as_ref().join(stem);
    Ok((read_ascii_grid(base.with_extension("wse.asc"))?, read_ascii_grid(base.with_extension("hmax.asc"))?))
}

/// All parseable records in log order. A torn final line, left by an
/// interrupted write, is skipped.
pub fn read_records(dir: impl AsRef<Path>) -> Result<Vec<RunRecord>, CampaignError> {
    let path = dir.as_ref().join(RECORDS_FILE);
    if !path.exists() {
        return Ok(Vec::new());
    }
    let f = File::open(&path).map_err(|e| IoError::io(&path, e))?;
    let lines: Vec<String> = BufReader::new(f).lines().collect::<Result<_, _>>().map_err(|e| IoError::io(&path, e))?;
    let last = lines.len().saturating_sub(1);
    let mut out = Vec::with_capacity(lines.len());
    for (k, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(r) => out.push(r),
            Err(_) if k == last => {}
            Err(e) => return Err(CampaignError::Store(format!("{}: line {}: {e}", path.display(), k + 1))),
        }
    }
    Ok(out)
}

/// Latest record per run.
pub fn latest_records(records: &[RunRecord]) -> BTreeMap<usize, &RunRecord> {
    let mut m = BTreeMap::new();
    for r in records {
        m.insert(r.run_id, r);
    }
    m
}

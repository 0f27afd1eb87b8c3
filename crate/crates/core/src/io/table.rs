use std::path::Path;

use crate::error::IoError;

/// Header plus string cells; the shape shared by every CSV the toolkit emits.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest representation that parses back to the same bits.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_string()
    } else {
        ryu::Buffer::new().format(v).to_string()
    }
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Parses one column as floats.
    pub fn f64_column(&self, name: &str) -> Result<Vec<f64>, IoError> {
        let j = self
            .column_index(name)
            .ok_or_else(|| IoError::Parse { line: 1, msg: format!("missing column `{name}`") })?;
        self.rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r[j].trim().parse::<f64>().map_err(|_| IoError::Parse {
                    line: i + 2,
                    msg: format!("column `{name}`: not a number `{}`", r[j]),
                })
            })
            .collect()
    }
}

pub fn write_csv(table: &Table, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(&table.columns)?;
    for r in &table.rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Table, IoError> {
    let mut r = csv::Reader::from_path(path.as_ref())?;
    let columns = r.headers()?.iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.map(|rec| rec.iter().map(str::to_string).collect()))
        .collect::<Result<Vec<Vec<String>>, _>>()?;
    Ok(Table { columns, rows })
}

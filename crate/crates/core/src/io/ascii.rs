use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::IoError;
use crate::grid::Grid;

pub const DEFAULT_NODATA: f64 = -9999.0;

/// Georeferenced grid of scalars. Values are row-major, north row first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Raster {
    pub grid: Grid,
    pub values: Vec<f64>,
    pub nodata: f64,
}

impl Raster {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, IoError> {
        if values.len() != grid.len() {
            return Err(IoError::ValueCount { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values, nodata: DEFAULT_NODATA })
    }

    pub fn filled(grid: Grid, value: f64) -> Self {
        Self { grid, values: vec![value; grid.len()], nodata: DEFAULT_NODATA }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for r in 0..grid.nrows {
            for c in 0..grid.ncols {
                values.push(f(r, c));
            }
        }
        Self { grid, values, nodata: DEFAULT_NODATA }
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[self.grid.index(row, col)]
    }

    #[inline]
    pub fn is_nodata(&self, i: usize) -> bool {
        self.values[i] == self.nodata || self.values[i].is_nan()
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.grid.ncols;
        &self.values[row * n..(row + 1) * n]
    }

    /// Mean over valid cells, `None` if every cell is NODATA.
    pub fn mean(&self) -> Option<f64> {
        let (s, k) = (0..self.values.len())
            .filter(|&i| !self.is_nodata(i))
            .fold((0.0, 0usize), |(s, k), i| (s + self.values[i], k + 1));
        (k > 0).then(|| s / k as f64)
    }
}

fn nodata_token(nodata: f64) -> String {
    if nodata.fract() == 0.0 && nodata.abs() < 1e15 {
        format!("{}", nodata as i64)
    } else {
        ryu::Buffer::new().format(nodata).to_string()
    }
}

/// Row-at-a-time ESRI ASCII grid writer.
pub struct AsciiGridWriter {
    out: BufWriter<File>,
    path: PathBuf,
    grid: Grid,
    nodata: f64,
    token: String,
    rows_written: usize,
    fmt: ryu::Buffer,
}

impl AsciiGridWriter {
    pub fn create(path: impl AsRef<Path>, grid: Grid, nodata: f64) -> Result<Self, IoError> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| IoError::io(&path, e))?;
        let mut out = BufWriter::with_capacity(1 << 16, file);
        let token = nodata_token(nodata);
        let f = |v: f64| ryu::Buffer::new().format(v).to_string();
        let header = format!(
            "ncols {}\nnrows {}\nxllcorner {}\nyllcorner {}\ncellsize {}\nNODATA_value {}\n",
            grid.ncols,
            grid.nrows,
            f(grid.xll),
            f(grid.yll),
            f(grid.cellsize),
            token
        );
        out.write_all(header.as_bytes()).map_err(|e| IoError::io(&path, e))?;
        Ok(Self { out, path, grid, nodata, token, rows_written: 0, fmt: ryu::Buffer::new() })
    }

    pub fn write_row(&mut self, row: &[f64]) -> Result<(), IoError> {
        if row.len() != self.grid.ncols || self.rows_written == self.grid.nrows {
            return Err(IoError::ValueCount { expected: self.grid.ncols, got: row.len() });
        }
        let mut line = String::with_capacity(row.len() * 12);
        for (i, &v) in row.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            if v == self.nodata || v.is_nan() {
                line.push_str(&self.token);
            } else {
                line.push_str(self.fmt.format(v));
            }
        }
        line.push('\n');
        self.out.write_all(line.as_bytes()).map_err(|e| IoError::io(&self.path, e))?;
        self.rows_written += 1;
        Ok(())
    }

    pub fn finish(mut self) -> Result<(), IoError> {
        if self.rows_written != self.grid.nrows {
            return Err(IoError::ValueCount {
                expected: self.grid.len(),
                got: self.rows_written * self.grid.ncols,
            });
        }
        self.out.flush().map_err(|e| IoError::io(&self.path, e))
    }
}

/// Row-at-a-time ESRI ASCII grid reader.
pub struct AsciiGridReader {
    lines: std::io::Lines<BufReader<File>>,
    pub grid: Grid,
    pub nodata: f64,
    pending: Vec<f64>,
    line_no: usize,
    rows_read: usize,
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T, IoError> {
    tok.parse::<T>()
        .map_err(|_| IoError::Parse { line, msg: format!("invalid {what} `{tok}`") })
}

impl AsciiGridReader {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, IoError> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| IoError::io(path, e))?;
        let mut lines = BufReader::with_capacity(1 << 16, file).lines();

        let mut ncols: Option<usize> = None;
        let mut nrows: Option<usize> = None;
        let mut x: Option<(f64, bool)> = None;
        let mut y: Option<(f64, bool)> = None;
        let mut cellsize: Option<f64> = None;
        let mut nodata = DEFAULT_NODATA;
        let mut line_no = 0;
        let mut pending = Vec::new();

        for line in lines.by_ref() {
            line_no += 1;
            let line = line.map_err(|e| IoError::io(path, e))?;
            let mut toks = line.split_whitespace();
            let Some(key) = toks.next() else { continue };
            if key.parse::<f64>().is_ok() {
                for t in line.split_whitespace() {
                    pending.push(parse_num::<f64>(t, line_no, "value")?);
                }
                break;
            }
            let val = toks
                .next()
                .ok_or_else(|| IoError::Parse { line: line_no, msg: format!("header key `{key}` has no value") })?;
            match key.to_ascii_lowercase().as_str() {
                "ncols" => ncols = Some(parse_num(val, line_no, "ncols")?),
                "nrows" => nrows = Some(parse_num(val, line_no, "nrows")?),
                "xllcorner" => x = Some((parse_num(val, line_no, "xllcorner")?, false)),
                "xllcenter" => x = Some((parse_num(val, line_no, "xllcenter")?, true)),
                "yllcorner" => y = Some((parse_num(val, line_no, "yllcorner")?, false)),
                "yllcenter" => y = Some((parse_num(val, line_no, "yllcenter")?, true)),
                "cellsize" => cellsize = Some(parse_num(val, line_no, "cellsize")?),
                "nodata_value" => nodata = parse_num(val, line_no, "NODATA_value")?,
                other => {
                    return Err(IoError::Parse { line: line_no, msg: format!("unknown header key `{other}`") })
                }
            }
        }

        let ncols = ncols.ok_or(IoError::HeaderMismatch("ncols"))?;
        let nrows = nrows.ok_or(IoError::HeaderMismatch("nrows"))?;
        let cellsize = cellsize.ok_or(IoError::HeaderMismatch("cellsize"))?;
        let (xv, xc) = x.ok_or(IoError::HeaderMismatch("xllcorner"))?;
        let (yv, yc) = y.ok_or(IoError::HeaderMismatch("yllcorner"))?;
        let xll = if xc { xv - 0.5 * cellsize } else { xv };
        let yll = if yc { yv - 0.5 * cellsize } else { yv };
        let grid = Grid::new(ncols, nrows, cellsize, xll, yll)?;
        Ok(Self { lines, grid, nodata, pending, line_no, rows_read: 0 })
    }

    /// Reads the next row (north first) into `buf`; `Ok(false)` once all rows are read.
    pub fn next_row(&mut self, buf: &mut Vec<f64>) -> Result<bool, IoError> {
        if self.rows_read == self.grid.nrows {
            return Ok(false);
        }
        let n = self.grid.ncols;
        while self.pending.len() < n {
            let Some(line) = self.lines.next() else {
                return Err(IoError::Parse {
                    line: self.line_no,
                    msg: format!("unexpected end of file in row {}", self.rows_read),
                });
            };
            self.line_no += 1;
            let line = line.map_err(|e| IoError::Parse { line: self.line_no, msg: e.to_string() })?;
            for t in line.split_whitespace() {
                self.pending.push(parse_num::<f64>(t, self.line_no, "value")?);
            }
        }
        buf.clear();
        buf.extend(self.pending.drain(..n));
        self.rows_read += 1;
        if self.rows_read == self.grid.nrows && !self.pending.is_empty() {
            return Err(IoError::Parse { line: self.line_no, msg: "too many values".into() });
        }
        Ok(true)
    }
}

pub fn read_ascii_grid(path: impl AsRef<Path>) -> Result<Raster, IoError> {
    let mut reader = AsciiGridReader::open(path)?;
    let mut values = Vec::with_capacity(reader.grid.len());
    let mut row = Vec::with_capacity(reader.grid.ncols);
    while reader.next_row(&mut row)? {
        values.extend_from_slice(&row);
    }
    // trailing tokens after the last row
    for line in reader.lines.by_ref() {
        reader.line_no += 1;
        if let Ok(l) = line {
            if !l.trim().is_empty() {
                return Err(IoError::Parse { line: reader.line_no, msg: "too many values".into() });
            }
        }
    }
    Ok(Raster { grid: reader.grid, values, nodata: reader.nodata })
}

pub fn write_ascii_grid(raster: &Raster, path: impl AsRef<Path>) -> Result<(), IoError> {
    if raster.values.len() != raster.grid.len() {
        return Err(IoError::ValueCount { expected: raster.grid.len(), got: raster.values.len() });
    }
    let mut w = AsciiGridWriter::create(path, raster.grid, raster.nodata)?;
    for r in 0..raster.grid.nrows {
        w.write_row(raster.row(r))?;
    }
    w.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tmp() -> tempfile::TempDir {
        tempfile::tempdir().unwrap()
    }

    #[test]
    fn single_cell() {
        let d = tmp();
        let p = d.path().join("one.asc");
        std::fs::write(&p, "ncols 1\nnrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n2.5\n").unwrap();
        let r = read_ascii_grid(&p).unwrap();
        assert_eq!((r.grid.ncols, r.grid.nrows), (1, 1));
        assert_eq!(r.values, vec![2.5]);
    }

    #[test]
    fn header_is_case_insensitive_and_center_shifted() {
        let d = tmp();
        let p = d.path().join("c.asc");
        std::fs::write(&p, "NCOLS 2\nNROWS 1\nXLLCENTER 0.5\nYLLCENTER 0.5\nCELLSIZE 1\n1 2\n").unwrap();
        let r = read_ascii_grid(&p).unwrap();
        assert_eq!((r.grid.xll, r.grid.yll), (0.0, 0.0));
        assert_eq!(r.values, vec![1.0, 2.0]);
        assert_eq!(r.nodata, DEFAULT_NODATA);
    }

    #[test]
    fn missing_ncols() {
        let d = tmp();
        let p = d.path().join("bad.asc");
        std::fs::write(&p, "nrows 1\nxllcorner 0\nyllcorner 0\ncellsize 1\n2.5\n").unwrap();
        assert!(matches!(read_ascii_grid(&p), Err(IoError::HeaderMismatch("ncols"))));
    }

    #[test]
    fn parse_error_reports_line() {
        let d = tmp();
        let p = d.path().join("bad.asc");
        std::fs::write(&p, "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3 x\n").unwrap();
        match read_ascii_grid(&p) {
            Err(IoError::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn short_file_is_error() {
        let d = tmp();
        let p = d.path().join("short.asc");
        std::fs::write(&p, "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n3\n").unwrap();
        assert!(matches!(read_ascii_grid(&p), Err(IoError::Parse { .. })));
    }

    #[test]
    fn nodata_written_as_header_token() {
        let d = tmp();
        let p = d.path().join("nd.asc");
        let g = Grid::new(3, 1, 1.0, 0.0, 0.0).unwrap();
        let r = Raster::new(g, vec![1.0, DEFAULT_NODATA, f64::NAN]).unwrap();
        write_ascii_grid(&r, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("NODATA_value -9999\n"));
        assert!(text.ends_with("1.0 -9999 -9999\n"));
        let back = read_ascii_grid(&p).unwrap();
        assert!(back.is_nodata(1) && back.is_nodata(2));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn round_trip_is_bit_identical(
            ncols in 1usize..12, nrows in 1usize..12,
            cellsize in 0.01f64..100.0, xll in -1e6f64..1e6, yll in -1e6f64..1e6,
            seed in any::<u64>(),
        ) {
            let g = Grid::new(ncols, nrows, cellsize, xll, yll).unwrap();
            let mut s = crate::rng::UniformStream::new(seed, 0);
            let r = Raster::from_fn(g, |_, _| {
                let u = s.next_open01();
                if u < 0.05 { DEFAULT_NODATA } else { (u - 0.5) * 10f64.powi((s.next_index(20) as i32) - 10) }
            });
            let d = tempfile::tempdir().unwrap();
            let p = d.path().join("r.asc");
            write_ascii_grid(&r, &p).unwrap();
            let back = read_ascii_grid(&p).unwrap();
            prop_assert_eq!(back.grid, r.grid);
            let a: Vec<u64> = r.values.iter().map(|v| v.to_bits()).collect();
            let b: Vec<u64> = back.values.iter().map(|v| v.to_bits()).collect();
            prop_assert_eq!(a, b);
        }
    }
}

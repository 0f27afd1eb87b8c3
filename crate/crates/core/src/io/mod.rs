//! Raster and table persistence.

mod ascii;
mod table;

pub use ascii::{read_ascii_grid, write_ascii_grid, AsciiGridReader, AsciiGridWriter, Raster, DEFAULT_NODATA};
pub use table::{fmt_f64, read_csv, write_csv, Table};

use serde::{Deserialize, Serialize};

use crate::error::GridError;

/// Regular Cartesian mesh with square cells.
///
/// Cells are addressed `(row, col)` with row 0 on the north edge, matching the
/// ESRI ASCII layout. `(xll, yll)` is the south-west corner of the domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub ncols: usize,
    pub nrows: usize,
    pub cellsize: f64,
    pub xll: f64,
    pub yll: f64,
}

impl Grid {
    pub fn new(ncols: usize, nrows: usize, cellsize: f64, xll: f64, yll: f64) -> Result<Self, GridError> {
        if ncols == 0 || nrows == 0 {
            return Err(GridError::Empty { ncols, nrows });
        }
        if !(cellsize > 0.0 && cellsize.is_finite()) {
            return Err(GridError::BadCellsize(cellsize));
        }
        if !(xll.is_finite() && yll.is_finite()) {
            return Err(GridError::BadOrigin);
        }
        Ok(Self { ncols, nrows, cellsize, xll, yll })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ncols * self.nrows
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.ncols + col
    }

    pub fn width(&self) -> f64 {
        self.ncols as f64 * self.cellsize
    }

    pub fn height(&self) -> f64 {
        self.nrows as f64 * self.cellsize
    }

    pub fn cell_area(&self) -> f64 {
        self.cellsize * self.cellsize
    }

    /// Map coordinates of the centre of a cell.
    pub fn cell_center(&self, row: usize, col: usize) -> (f64, f64) {
        let x = self.xll + (col as f64 + 0.5) * self.cellsize;
        let y = self.yll + (self.nrows as f64 - row as f64 - 0.5) * self.cellsize;
        (x, y)
    }

    /// Cell containing the point, or `None` outside the domain.
    pub fn locate(&self, x: f64, y: f64) -> Option<(usize, usize)> {
        let fc = (x - self.xll) / self.cellsize;
        let fr = (self.yll + self.height() - y) / self.cellsize;
        if !(fc >= 0.0 && fr >= 0.0) {
            return None;
        }
        let (c, r) = (fc.floor() as usize, fr.floor() as usize);
        // the east and north edges belong to the last cell
        let c = if c == self.ncols && fc == self.ncols as f64 { c - 1 } else { c };
        let r = if r == self.nrows && fr == self.nrows as f64 { r - 1 } else { r };
        (c < self.ncols && r < self.nrows).then_some((r, c))
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xll && x <= self.xll + self.width() && y >= self.yll && y <= self.yll + self.height()
    }

    /// Same georeference: dimensions, cell size and origin.
    pub fn same_as(&self, other: &Grid) -> bool {
        self == other
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate() {
        assert!(Grid::new(0, 3, 1.0, 0.0, 0.0).is_err());
        assert!(Grid::new(3, 3, 0.0, 0.0, 0.0).is_err());
        assert!(Grid::new(3, 3, -2.0, 0.0, 0.0).is_err());
        assert!(Grid::new(3, 3, 1.0, f64::NAN, 0.0).is_err());
    }

    #[test]
    fn centers_and_lookup() {
        let g = Grid::new(4, 3, 2.0, 10.0, 20.0).unwrap();
        assert_eq!(g.cell_center(0, 0), (11.0, 25.0));
        assert_eq!(g.cell_center(2, 3), (17.0, 21.0));
        assert_eq!(g.locate(11.0, 25.0), Some((0, 0)));
        assert_eq!(g.locate(18.0, 20.0), Some((2, 3)));
        assert_eq!(g.locate(9.9, 21.0), None);
        assert_eq!(g.locate(12.0, 26.5), None);
    }
}

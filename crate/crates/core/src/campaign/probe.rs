use serde::{Deserialize, Serialize};

use super::scenario::block_max;
use crate::error::CampaignError;
use crate::grid::Grid;
use crate::io::Raster;
use crate::swe::SimulationOutput;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `[xmin, ymin, xmax, ymax]`.
    Rect([f64; 4]),
    /// Closed polygon vertices `[x, y]`.
    Polygon(Vec<[f64; 2]>),
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match self {
            Region::Rect([x0, y0, x1, y1]) => x >= *x0 && x <= *x1 && y >= *y0 && y <= *y1,
            Region::Polygon(v) => {
                // even-odd ray casting
                let mut inside = false;
                let n = v.len();
                for i in 0..n {
                    let ([xi, yi], [xj, yj]) = (v[i], v[(i + n - 1) % n]);
                    if (yi > y) != (yj > y) && x < (xj - xi) * (y - yi) / (yj - yi) + xi {
                        inside = !inside;
                    }
                }
                inside
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbeKind {
    Point { x: f64, y: f64 },
    AreaMean { region: Region },
    AreaMax { region: Region },
    FullMap,
}

/// A named output of interest extracted from `wse_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Probe {
    pub name: String,
    #[serde(flatten)]
    pub kind: ProbeKind,
}

impl Probe {
    pub fn new(name: impl Into<String>, kind: ProbeKind) -> Self {
        Self { name: name.into(), kind }
    }

    pub fn is_map(&self) -> bool {
        matches!(self.kind, ProbeKind::FullMap)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ProbeValue {
    Scalar(f64),
    /// `wse_max` and `hmax` aggregated onto the common grid.
    Map { wse_max: Raster, hmax: Raster },
}

/// Bilinear interpolation between cell centres; points between the outermost
/// centres and the domain edge take the nearest edge values.
pub fn bilinear(r: &Raster, x: f64, y: f64) -> Option<f64> {
    let g = r.grid;
    g.locate(x, y)?;
    let fc = ((x - g.xll) / g.cellsize - 0.5).clamp(0.0, (g.ncols - 1) as f64);
    let fr = ((g.yll + g.height() - y) / g.cellsize - 0.5).clamp(0.0, (g.nrows - 1) as f64);
    let (c0, r0) = (fc.floor() as usize, fr.floor() as usize);
    let (c1, r1) = ((c0 + 1).min(g.ncols - 1), (r0 + 1).min(g.nrows - 1));
    let (tx, ty) = (fc - c0 as f64, fr - r0 as f64);
    let v = |r_: usize, c: usize| r.get(r_, c);
    if tx == 0.0 && ty == 0.0 {
        return Some(v(r0, c0));
    }
    let top = v(r0, c0) * (1.0 - tx) + v(r0, c1) * tx;
    let bottom = v(r1, c0) * (1.0 - tx) + v(r1, c1) * tx;
    Some(top * (1.0 - ty) + bottom * ty)
}

fn region_cells(g: Grid, region: &Region) -> Vec<usize> {
    let mut out = Vec::new();
    for r in 0..g.nrows {
        for c in 0..g.ncols {
            let (x, y) = g.cell_center(r, c);
            if region.contains(x, y) {
                out.push(g.index(r, c));
            }
        }
    }
    out
}

/// Extracts one probe from a simulation; `common` is the grid full maps are aggregated onto.
pub fn extract_output(sim: &SimulationOutput, probe: &Probe, common: Grid) -> Result<ProbeValue, CampaignError> {
    let w = &sim.wse_max;
    let out = || CampaignError::OutOfDomain(probe.name.clone());
    Ok(match &probe.kind {
        ProbeKind::Point { x, y } => ProbeValue::Scalar(bilinear(w, *x, *y).ok_or_else(out)?),
        ProbeKind::AreaMean { region } => {
            let cells = region_cells(w.grid, region);
            if cells.is_empty() {
                return Err(out());
            }
            ProbeValue::Scalar(cells.iter().map(|&i| w.values[i]).sum::<f64>() / cells.len() as f64)
        }
        ProbeKind::AreaMax { region } => {
            let cells = region_cells(w.grid, region);
            if cells.is_empty() {
                return Err(out());
            }
            ProbeValue::Scalar(cells.iter().map(|&i| w.values[i]).fold(f64::NEG_INFINITY, f64::max))
        }
        ProbeKind::FullMap => ProbeValue::Map { wse_max: block_max(w, common), hmax: block_max(&sim.hmax, common) },
    })
}

/// Checks probe geometry against the domain before any run starts.
pub fn validate_probe(probe: &Probe, grid: Grid) -> Result<(), CampaignError> {
    let out = || Err(CampaignError::OutOfDomain(probe.name.clone()));
    match &probe.kind {
        ProbeKind::Point { x, y } if grid.locate(*x, *y).is_none() => out(),
        ProbeKind::AreaMean { region } | ProbeKind::AreaMax { region } if region_cells(grid, region).is_empty() => out(),
        _ => Ok(()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bilinear_at_centres_and_midpoints() {
        let g = Grid::new(3, 2, 1.0, 0.0, 0.0).unwrap();
        let r = Raster::new(g, vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(bilinear(&r, 0.5, 1.5), Some(1.0));
        assert_eq!(bilinear(&r, 2.5, 0.5), Some(6.0));
        assert_eq!(bilinear(&r, 1.0, 1.5), Some(1.5));
        assert_eq!(bilinear(&r, 1.0, 1.0), Some(3.0));
        assert_eq!(bilinear(&r, 0.1, 1.9), Some(1.0));
        assert_eq!(bilinear(&r, 3.5, 1.0), None);
    }

    #[test]
    fn polygon_membership() {
        let tri = Region::Polygon(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]]);
        assert!(tri.contains(1.0, 1.0));
        assert!(!tri.contains(3.0, 3.0));
    }

    #[test]
    fn probe_toml_shape() {
        #[derive(Deserialize)]
        struct W {
            probes: Vec<Probe>,
        }
        let w: W = toml::from_str(
            r#"
            [[probes]]
            name = "gauge"
            kind = "point"
            x = 1.0
            y = 2.0
            [[probes]]
            name = "town"
            kind = "area_max"
            region = { rect = [0.0, 0.0, 10.0, 5.0] }
            [[probes]]
            name = "map"
            kind = "full_map"
            "#,
        )
        .unwrap();
        assert_eq!(w.probes[0].kind, ProbeKind::Point { x: 1.0, y: 2.0 });
        assert!(w.probes[2].is_map());
    }
}

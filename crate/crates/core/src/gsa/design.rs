use std::path::Path;

use serde::{Deserialize, Serialize};

use super::distribution::{validate_parameters, InputParameter};
use crate::error::{GsaError, IoError};
use crate::exec::Execution;
use crate::io::{fmt_f64, read_csv, write_csv, Table};
use crate::rng::UniformStream;

/// Which pick-freeze matrix a run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    A,
    B,
    /// `A` with column `i` taken from `B`.
    AB(usize),
}

/// Pick-freeze sample set: two independent `n × p` matrices `A` and `B`;
/// the hybrid matrices `A_B^(i)` are derived on demand.
///
/// Runs are numbered block by block: `A` rows, then `B` rows, then
/// `A_B^(1)`, … `A_B^(p)`, for `n·(p+2)` runs in total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleDesign {
    pub n: usize,
    pub seed: u64,
    pub parameters: Vec<InputParameter>,
    /// Row-major `n × p`.
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Draws a design. Column `i` of `A` uses counter stream `2i`, of `B` `2i+1`.
pub fn sample(params: &[InputParameter], n: usize, seed: u64) -> Result<SampleDesign, GsaError> {
    validate_parameters(params)?;
    if n < 2 {
        return Err(GsaError::InvalidDesign(format!("n must be >= 2 (got {n})")));
    }
    if params.is_empty() {
        return Err(GsaError::InvalidDesign("no parameters".into()));
    }
    let p = params.len();
    let cols = Execution::Parallel.map_range(2 * p, |k| {
        let mut s = UniformStream::new(seed, k as u64);
        let d = &params[k / 2].distribution;
        (0..n).map(|_| d.quantile(s.next_open01())).collect::<Vec<f64>>()
    });
    let mut a = vec![0.0; n * p];
    let mut b = vec![0.0; n * p];
    for i in 0..p {
        for j in 0..n {
            a[j * p + i] = cols[2 * i][j];
            b[j * p + i] = cols[2 * i + 1][j];
        }
    }
    Ok(SampleDesign { n, seed, parameters: params.to_vec(), a, b })
}

#[derive(Serialize, Deserialize)]
struct DesignMeta {
    n: usize,
    seed: u64,
    parameters: Vec<InputParameter>,
}

impl SampleDesign {
    pub fn p(&self) -> usize {
        self.parameters.len()
    }

    pub fn run_count(&self) -> usize {
        self.n * (self.p() + 2)
    }

    pub fn names(&self) -> Vec<String> {
        self.parameters.iter().map(|p| p.name.clone()).collect()
    }

    pub fn a_row(&self, j: usize) -> &[f64] {
        let p = self.p();
        &self.a[j * p..(j + 1) * p]
    }

    pub fn b_row(&self, j: usize) -> &[f64] {
        let p = self.p();
        &self.b[j * p..(j + 1) * p]
    }

    pub fn row(&self, block: Block, j: usize) -> Vec<f64> {
        match block {
            Block::A => self.a_row(j).to_vec(),
            Block::B => self.b_row(j).to_vec(),
            Block::AB(i) => {
                let mut r = self.a_row(j).to_vec();
                r[i] = self.b_row(j)[i];
                r
            }
        }
    }

    pub fn locate(&self, run_id: usize) -> (Block, usize) {
        let (k, j) = (run_id / self.n, run_id % self.n);
        let block = match k {
            0 => Block::A,
            1 => Block::B,
            k => Block::AB(k - 2),
        };
        (block, j)
    }

    /// Parameter vector of run `run_id`.
    pub fn run_row(&self, run_id: usize) -> Vec<f64> {
        let (b, j) = self.locate(run_id);
        self.row(b, j)
    }

    /// Writes `design.json` (metadata) plus `A.csv` and `B.csv`.
    pub fn save(&self, dir: impl AsRef<Path>) -> Result<(), IoError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        let meta = DesignMeta { n: self.n, seed: self.seed, parameters: self.parameters.clone() };
        let path = dir.join("design.json");
        let text = serde_json::to_string_pretty(&meta).expect("serialisable");
        std::fs::write(&path, text).map_err(|e| IoError::io(&path, e))?;
        for (name, m) in [("A.csv", &self.a), ("B.csv", &self.b)] {
            let mut t = Table::new(self.names());
            for row in m.chunks(self.p()) {
                t.push(row.iter().map(|&v| fmt_f64(v)).collect());
            }
            write_csv(&t, dir.join(name))?;
        }
        Ok(())
    }

    pub fn load(dir: impl AsRef<Path>) -> Result<Self, IoError> {
        let dir = dir.as_ref();
        let path = dir.join("design.json");
        let text = std::fs::read_to_string(&path).map_err(|e| IoError::io(&path, e))?;
        let meta: DesignMeta =
            serde_json::from_str(&text).map_err(|e| IoError::Parse { line: e.line(), msg: e.to_string() })?;
        let names: Vec<String> = meta.parameters.iter().map(|p| p.name.clone()).collect();
        let read = |name: &str| -> Result<Vec<f64>, IoError> {
            let t = read_csv(dir.join(name))?;
            if t.rows.len() != meta.n {
                return Err(IoError::Parse { line: 1, msg: format!("{name}: expected {} rows, got {}", meta.n, t.rows.len()) });
            }
            let cols = names.iter().map(|n| t.f64_column(n)).collect::<Result<Vec<_>, _>>()?;
            Ok((0..meta.n).flat_map(|j| cols.iter().map(move |c| c[j])).collect())
        };
        let a = read("A.csv")?;
        let b = read("B.csv")?;
        Ok(Self { n: meta.n, seed: meta.seed, parameters: meta.parameters, a, b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gsa::Distribution;

    fn params() -> Vec<InputParameter> {
        vec![
            InputParameter::new("x", Distribution::Uniform { low: 0.0, high: 1.0 }),
            InputParameter::new("s", Distribution::Categorical { labels: vec!["S1".into(), "S2".into()] }),
            InputParameter::new("r", Distribution::DiscreteUniform { values: vec![1.0, 2.0, 5.0] }),
        ]
    }

    #[test]
    fn hybrid_rows_differ_only_in_their_column() {
        let d = sample(&params(), 50, 3).unwrap();
        assert_eq!(d.run_count(), 250);
        for j in 0..d.n {
            for i in 0..3 {
                let ab = d.row(Block::AB(i), j);
                for k in 0..3 {
                    let expect = if k == i { d.b_row(j)[k] } else { d.a_row(j)[k] };
                    assert_eq!(ab[k], expect);
                }
            }
        }
        assert_eq!(d.locate(0), (Block::A, 0));
        assert_eq!(d.locate(51), (Block::B, 1));
        assert_eq!(d.locate(249), (Block::AB(2), 49));
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(sample(&params(), 1, 0).is_err());
        let bad = vec![InputParameter::new("x", Distribution::Normal { mean: 0.0, std: -1.0 })];
        assert!(matches!(sample(&bad, 10, 0), Err(GsaError::InvalidDistribution { .. })));
    }

    #[test]
    fn save_load_round_trip() {
        let d = sample(&params(), 20, 77).unwrap();
        let dir = tempfile::tempdir().unwrap();
        d.save(dir.path()).unwrap();
        assert_eq!(SampleDesign::load(dir.path()).unwrap(), d);
    }
}

//! Pick-freeze estimators: Saltelli (2010) first order, Jansen total order,
//! percentile bootstrap intervals.

use serde::{Deserialize, Serialize};

use crate::error::GsaError;
use crate::exec::Execution;
use crate::io::{fmt_f64, Table};
use crate::rng::UniformStream;

/// Reported indices are clamped to this range; raw values are kept alongside.
pub const REPORT_RANGE: (f64, f64) = (-0.1, 1.1);

/// Model outputs in run order: `A` rows, `B` rows, then `A_B^(1..p)` rows.
#[derive(Debug, Clone, Copy)]
pub struct PickFreezeOutputs<'a> {
    n: usize,
    p: usize,
    y: &'a [f64],
}

impl<'a> PickFreezeOutputs<'a> {
    pub fn new(n: usize, p: usize, y: &'a [f64]) -> Result<Self, GsaError> {
        if n < 2 || p == 0 {
            return Err(GsaError::InvalidDesign(format!("need n >= 2 and p >= 1 (got n={n}, p={p})")));
        }
        if y.len() != n * (p + 2) {
            return Err(GsaError::InvalidDesign(format!("expected {} outputs, got {}", n * (p + 2), y.len())));
        }
        if let Some(k) = y.iter().position(|v| !v.is_finite()) {
            return Err(GsaError::InvalidDesign(format!("output of run {k} is not finite")));
        }
        Ok(Self { n, p, y })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn ya(&self) -> &'a [f64] {
        &self.y[..self.n]
    }

    pub fn yb(&self) -> &'a [f64] {
        &self.y[self.n..2 * self.n]
    }

    pub fn yab(&self, i: usize) -> &'a [f64] {
        &self.y[(2 + i) * self.n..(3 + i) * self.n]
    }

    /// First `m` rows of every block.
    pub fn truncated(&self, m: usize) -> Vec<f64> {
        (0..self.p + 2).flat_map(|k| self.y[k * self.n..k * self.n + m].iter().copied()).collect()
    }
}

pub fn variance_floor(mean: f64) -> f64 {
    1e-12 * (1.0 + mean * mean)
}

/// Raw estimates on the rows selected by `row(k)`, `k in 0..m`.
#[derive(Debug, Clone, PartialEq)]
struct Raw {
    first: Vec<f64>,
    total: Vec<f64>,
    mean: f64,
    var: f64,
}

fn estimate_rows(o: &PickFreezeOutputs, m: usize, row: impl Fn(usize) -> usize) -> Result<Raw, GsaError> {
    let (ya, yb) = (o.ya(), o.yb());
    let mut sum = 0.0;
    for k in 0..m {
        let j = row(k);
        sum += ya[j] + yb[j];
    }
    let mean = sum / (2 * m) as f64;
    let mut ss = 0.0;
    for k in 0..m {
        let j = row(k);
        ss += (ya[j] - mean).powi(2) + (yb[j] - mean).powi(2);
    }
    let var = ss / (2 * m - 1) as f64;
    let floor = variance_floor(mean);
    if !(var >= floor) {
        return Err(GsaError::DegenerateVariance { var, floor });
    }
    let mut first = Vec::with_capacity(o.p);
    let mut total = Vec::with_capacity(o.p);
    for i in 0..o.p {
        let yab = o.yab(i);
        let (mut s1, mut st) = (0.0, 0.0);
        for k in 0..m {
            let j = row(k);
            let d = yab[j] - ya[j];
            s1 += (yb[j] - mean) * d;
            st += d * d;
        }
        first.push(s1 / m as f64 / var);
        total.push(st / (2 * m) as f64 / var);
    }
    Ok(Raw { first, total, mean, var })
}

/// `(first, total)` raw estimates from the first `m` rows of every block.
pub(crate) fn estimate_prefix(o: &PickFreezeOutputs, m: usize) -> Result<(Vec<f64>, Vec<f64>), GsaError> {
    estimate_rows(o, m, |k| k).map(|r| (r.first, r.total))
}

/// Saltelli (2010) first-order indices, unclamped.
///
/// `S_i = mean_j[(Y_B - Ȳ)(Y_ABi - Y_A)] / Var(Y)`; centring `Y_B` keeps the
/// estimate invariant under affine changes of the output.
pub fn estimate_first_order(outputs: &PickFreezeOutputs) -> Result<Vec<f64>, GsaError> {
    estimate_rows(outputs, outputs.n, |k| k).map(|r| r.first)
}

/// Jansen total-order indices `S_Ti = mean_j[(Y_A - Y_ABi)²] / (2 Var(Y))`, unclamped.
pub fn estimate_total_order(outputs: &PickFreezeOutputs) -> Result<Vec<f64>, GsaError> {
    estimate_rows(outputs, outputs.n, |k| k).map(|r| r.total)
}

pub fn clamp_index(raw: f64) -> f64 {
    raw.clamp(REPORT_RANGE.0, REPORT_RANGE.1)
}

/// Closed interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// Linear-interpolation sample quantile of sorted data.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let k = pos.floor() as usize;
    let frac = pos - k as f64;
    if k + 1 < sorted.len() {
        sorted[k] + frac * (sorted[k + 1] - sorted[k])
    } else {
        sorted[k]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapOptions {
    pub level: f64,
    pub resamples: usize,
    pub seed: u64,
}

impl Default for BootstrapOptions {
    fn default() -> Self {
        Self { level: 0.95, resamples: 1000, seed: 0 }
    }
}

/// Percentile bootstrap intervals `(first, total)` per parameter.
///
/// Rows are resampled jointly across all blocks. Resample `b` draws its row
/// indices from counter stream `b`, so results do not depend on execution mode.
pub fn bootstrap_ci(
    outputs: &PickFreezeOutputs,
    opts: &BootstrapOptions,
    exec: Execution,
) -> Result<Vec<(Interval, Interval)>, GsaError> {
    let n = outputs.n;
    if n < 50 {
        return Err(GsaError::InvalidDesign(format!("bootstrap needs n >= 50 (got {n})")));
    }
    if !(opts.level > 0.0 && opts.level < 1.0) || opts.resamples < 2 {
        return Err(GsaError::InvalidDesign("bootstrap needs 0 < level < 1 and >= 2 resamples".into()));
    }
    // the full-sample estimate must itself be defined
    estimate_rows(outputs, n, |k| k)?;

    let reps = exec.map_range(opts.resamples, |b| {
        let mut s = UniformStream::new(opts.seed, b as u64);
        let rows: Vec<usize> = (0..n).map(|_| s.next_index(n)).collect();
        estimate_rows(outputs, n, |k| rows[k]).ok()
    });
    let reps: Vec<Raw> = reps.into_iter().flatten().collect();
    if reps.len() < 2 {
        return Err(GsaError::DegenerateVariance { var: 0.0, floor: 0.0 });
    }
    let (qlo, qhi) = (0.5 * (1.0 - opts.level), 0.5 * (1.0 + opts.level));
    let interval = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        Interval { lo: quantile_sorted(&v, qlo), hi: quantile_sorted(&v, qhi) }
    };
    Ok((0..outputs.p)
        .map(|i| {
            let f = interval(reps.iter().map(|r| r.first[i]).collect());
            let t = interval(reps.iter().map(|r| r.total[i]).collect());
            (f, t)
        })
        .collect())
}

/// One index with its interval. `value` and the interval bounds are clamped
/// to [`REPORT_RANGE`]; `raw` is the unclamped point estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexEstimate {
    pub value: f64,
    pub raw: f64,
    pub ci: Interval,
}

impl IndexEstimate {
    fn new(raw: f64, ci: Interval) -> Self {
        // percentile intervals can miss a biased point estimate; widen to contain it
        let ci = Interval { lo: clamp_index(ci.lo.min(raw)), hi: clamp_index(ci.hi.max(raw)) };
        Self { value: clamp_index(raw), raw, ci }
    }

    fn undefined() -> Self {
        Self { value: f64::NAN, raw: f64::NAN, ci: Interval { lo: f64::NAN, hi: f64::NAN } }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterIndices {
    pub name: String,
    pub first: IndexEstimate,
    pub total: IndexEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SobolResult {
    pub parameters: Vec<ParameterIndices>,
    pub var_y: f64,
    pub mean_y: f64,
    pub n_used: usize,
    /// Output variance below the floor; indices are NaN.
    pub degenerate: bool,
}

/// Point estimates plus bootstrap intervals. A degenerate output variance is
/// reported through the flag, not as an error.
pub fn analyze(
    names: &[String],
    outputs: &PickFreezeOutputs,
    opts: &BootstrapOptions,
    exec: Execution,
) -> Result<SobolResult, GsaError> {
    if names.len() != outputs.p {
        return Err(GsaError::InvalidDesign(format!("{} names for {} parameters", names.len(), outputs.p)));
    }
    let n = outputs.n;
    let (ya, yb) = (outputs.ya(), outputs.yb());
    let mean = (ya.iter().sum::<f64>() + yb.iter().sum::<f64>()) / (2 * n) as f64;
    let var = (ya.iter().chain(yb).map(|y| (y - mean).powi(2)).sum::<f64>()) / (2 * n - 1) as f64;
    match estimate_rows(outputs, n, |k| k) {
        Err(GsaError::DegenerateVariance { .. }) => Ok(SobolResult {
            parameters: names
                .iter()
                .map(|nm| ParameterIndices { name: nm.clone(), first: IndexEstimate::undefined(), total: IndexEstimate::undefined() })
                .collect(),
            var_y: var,
            mean_y: mean,
            n_used: n,
            degenerate: true,
        }),
        Err(e) => Err(e),
        Ok(raw) => {
            let cis = if n >= 50 {
                bootstrap_ci(outputs, opts, exec)?
            } else {
                // too few rows for a bootstrap: degenerate intervals at the estimate
                (0..outputs.p)
                    .map(|i| {
                        let f = Interval { lo: raw.first[i], hi: raw.first[i] };
                        let t = Interval { lo: raw.total[i], hi: raw.total[i] };
                        (f, t)
                    })
                    .collect()
            };
            Ok(SobolResult {
                parameters: names
                    .iter()
                    .enumerate()
                    .map(|(i, nm)| ParameterIndices {
                        name: nm.clone(),
                        first: IndexEstimate::new(raw.first[i], cis[i].0),
                        total: IndexEstimate::new(raw.total[i], cis[i].1),
                    })
                    .collect(),
                var_y: raw.var,
                mean_y: raw.mean,
                n_used: n,
                degenerate: false,
            })
        }
    }
}

pub const SOBOL_TABLE_COLUMNS: [&str; 12] =
    ["param", "S1", "S1_lo", "S1_hi", "ST", "ST_lo", "ST_hi", "varY", "n", "degenerate", "S1_raw", "ST_raw"];

impl SobolResult {
    /// Appends one row per parameter; `output` prefixes the parameter name
    /// when several outputs share a table.
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(SOBOL_TABLE_COLUMNS);
        self.append_rows(&mut t, None);
        t
    }

    pub fn append_rows(&self, t: &mut Table, output: Option<&str>) {
        for p in &self.parameters {
            let name = match output {
                Some(o) => format!("{o}:{}", p.name),
                None => p.name.clone(),
            };
            t.push(vec![
                name,
                fmt_f64(p.first.value),
                fmt_f64(p.first.ci.lo),
                fmt_f64(p.first.ci.hi),
                fmt_f64(p.total.value),
                fmt_f64(p.total.ci.lo),
                fmt_f64(p.total.ci.hi),
                fmt_f64(self.var_y),
                self.n_used.to_string(),
                self.degenerate.to_string(),
                fmt_f64(p.first.raw),
                fmt_f64(p.total.raw),
            ]);
        }
    }
}

use serde::{Deserialize, Serialize};

use super::estimator::{estimate_prefix, PickFreezeOutputs};
use crate::io::{fmt_f64, Table};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    pub mean: f64,
    /// `1.96 · s / √N` with `s` the sample standard deviation.
    pub half_width: f64,
    /// First-order indices on the truncated design; empty for plain samples,
    /// NaN where the truncated output variance is degenerate.
    pub first: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceSeries {
    pub checkpoints: Vec<Checkpoint>,
}

/// Sorted, deduplicated checkpoints within `[2, n]`.
fn valid_checkpoints(checkpoints: &[usize], n: usize) -> Vec<usize> {
    let mut c: Vec<usize> = checkpoints.iter().copied().filter(|&k| (2..=n).contains(&k)).collect();
    c.sort_unstable();
    c.dedup();
    c
}

fn mean_half_width(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let var = y.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, Z95 * var.sqrt() / n.sqrt())
}

/// Running mean and 95% half-width of the first `N` values, for each checkpoint `N`.
/// Checkpoints outside `[2, len]` are dropped.
pub fn convergence_series(y: &[f64], checkpoints: &[usize]) -> ConvergenceSeries {
    ConvergenceSeries {
        checkpoints: valid_checkpoints(checkpoints, y.len())
            .into_iter()
            .map(|n| {
                let (mean, half_width) = mean_half_width(&y[..n]);
                Checkpoint { n, mean, half_width, first: Vec::new() }
            })
            .collect(),
    }
}

/// Convergence of a pick-freeze study: mean and half-width of `Y_A`, plus
/// first-order indices recomputed from the first `N` rows of every block.
pub fn sobol_convergence(outputs: &PickFreezeOutputs, checkpoints: &[usize]) -> ConvergenceSeries {
    ConvergenceSeries {
        checkpoints: valid_checkpoints(checkpoints, outputs.n())
            .into_iter()
            .map(|n| {
                let (mean, half_width) = mean_half_width(&outputs.ya()[..n]);
                let first = estimate_prefix(outputs, n).map(|(f, _)| f).unwrap_or_else(|_| vec![f64::NAN; outputs.p()]);
                Checkpoint { n, mean, half_width, first }
            })
            .collect(),
    }
}

/// Powers of two from 4 up to `n`, plus `n` itself.
pub fn default_checkpoints(n: usize) -> Vec<usize> {
    let mut c: Vec<usize> = std::iter::successors(Some(4usize), |k| k.checked_mul(2)).take_while(|&k| k < n).collect();
    c.push(n);
    c
}

impl ConvergenceSeries {
    pub fn to_table(&self, names: &[String]) -> Table {
        let mut cols = vec!["N".to_string(), "mean".into(), "ci_half_width".into()];
        cols.extend(names.iter().map(|n| format!("S1_{n}")));
        let mut t = Table::new(cols);
        for c in &self.checkpoints {
            let mut row = vec![c.n.to_string(), fmt_f64(c.mean), fmt_f64(c.half_width)];
            row.extend((0..names.len()).map(|i| fmt_f64(c.first.get(i).copied().unwrap_or(f64::NAN))));
            t.push(row);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_checkpoints_dropped() {
        let s = convergence_series(&[1.0, 2.0, 3.0], &[5, 1, 3, 2, 3]);
        assert_eq!(s.checkpoints.iter().map(|c| c.n).collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(s.checkpoints[1].mean, 2.0);
    }

    #[test]
    fn default_checkpoints_end_at_n() {
        assert_eq!(default_checkpoints(20), vec![4, 8, 16, 20]);
        assert_eq!(default_checkpoints(16), vec![4, 8, 16]);
    }
}

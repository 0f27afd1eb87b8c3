use serde::{Deserialize, Serialize};

use crate::io::{fmt_f64, Table};

/// Equal-width bins over `[lo, hi]`. Bin 0 is `[e0, e1]`, bin k > 0 is `(ek, ek+1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

/// Histogram of `values` with `bins` bins. The range defaults to the data range;
/// values outside an explicit range are not counted.
pub fn histogram(values: &[f64], bins: usize, range: Option<(f64, f64)>) -> Histogram {
    let bins = bins.max(1);
    let (lo, mut hi) = range.unwrap_or_else(|| {
        values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)))
    });
    if !lo.is_finite() {
        return Histogram { edges: vec![0.0; bins + 1], counts: vec![0; bins] };
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let w = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|k| lo + k as f64 * w).collect();
    edges[bins] = hi;
    let mut counts = vec![0u64; bins];
    for &v in values {
        if !(v >= lo && v <= hi) {
            continue;
        }
        let mut k = (((v - lo) / w).ceil() as usize).saturating_sub(1).min(bins - 1);
        while k > 0 && v <= edges[k] {
            k -= 1;
        }
        while k + 1 < bins && v > edges[k + 1] {
            k += 1;
        }
        counts[k] += 1;
    }
    Histogram { edges, counts }
}

impl Histogram {
    pub fn to_table(&self) -> Table {
        let mut t = Table::new(["lo", "hi", "count"]);
        for (k, c) in self.counts.iter().enumerate() {
            t.push(vec![fmt_f64(self.edges[k]), fmt_f64(self.edges[k + 1]), c.to_string()]);
        }
        t
    }
}

/// Paired `(parameter value, output)` table.
pub fn scatter(name: &str, column: &[f64], outputs: &[f64]) -> Table {
    let mut t = Table::new([name, "output"]);
    for (x, y) in column.iter().zip(outputs) {
        t.push(vec![fmt_f64(*x), fmt_f64(*y)]);
    }
    t
}

/// Pearson sample correlation; NaN when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx).powi(2);
        syy += (b - my).powi(2);
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_bins() {
        let h = histogram(&[0.0, 0.5, 1.0, 1.0], 2, Some((0.0, 1.0)));
        assert_eq!(h.counts, vec![2, 2]);
        assert_eq!(h.edges, vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn all_equal_single_bin() {
        let h = histogram(&[3.0; 7], 5, None);
        assert_eq!(h.counts.iter().filter(|&&c| c > 0).count(), 1);
        assert_eq!(h.counts.iter().sum::<u64>(), 7);
    }

    #[test]
    fn counts_sum_to_n() {
        let v: Vec<f64> = (0..1000).map(|k| ((k * 7919) % 1000) as f64 / 37.0).collect();
        let h = histogram(&v, 13, None);
        assert_eq!(h.counts.iter().sum::<u64>(), 1000);
    }

    #[test]
    fn correlation_of_linear_map() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 - 2.0 * v).collect();
        assert!((pearson(&x, &y) + 1.0).abs() < 1e-12);
        assert!(pearson(&x, &[1.0; 4]).is_nan());
        assert_eq!(scatter("E", &x, &y).rows.len(), 4);
    }
}

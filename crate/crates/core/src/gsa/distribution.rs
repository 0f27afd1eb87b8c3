use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::GsaError;

/// Marginal law of one uncertain input.
///
/// Discrete and categorical laws are equiprobable. A categorical draw is the
/// level index `0..k` encoded as `f64`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Distribution {
    Normal { mean: f64, std: f64 },
    Uniform { low: f64, high: f64 },
    Triangular { low: f64, mode: f64, high: f64 },
    DiscreteUniform { values: Vec<f64> },
    Categorical { labels: Vec<String> },
}

impl Distribution {
    pub fn validate(&self) -> Result<(), String> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Distribution::Normal { mean, std } => {
                if !finite(&[*mean, *std]) || *std <= 0.0 {
                    return Err(format!("normal needs finite mean and std > 0 (got std = {std})"));
                }
            }
            Distribution::Uniform { low, high } => {
                if !finite(&[*low, *high]) || low >= high {
                    return Err(format!("uniform needs low < high (got [{low}, {high}])"));
                }
            }
            Distribution::Triangular { low, mode, high } => {
                if !finite(&[*low, *mode, *high]) || low >= high || mode < low || mode > high {
                    return Err(format!("triangular needs low <= mode <= high, low < high (got {low}, {mode}, {high})"));
                }
            }
            Distribution::DiscreteUniform { values } => {
                if values.len() < 2 || !finite(values) {
                    return Err("discrete uniform needs at least 2 finite values".into());
                }
            }
            Distribution::Categorical { labels } => {
                if labels.len() < 2 {
                    return Err("categorical needs at least 2 labels".into());
                }
                let mut seen = std::collections::HashSet::new();
                if !labels.iter().all(|l| seen.insert(l)) {
                    return Err("categorical labels must be unique".into());
                }
            }
        }
        Ok(())
    }

    /// Inverse CDF at `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            Distribution::Normal { mean, std } => Normal::new(*mean, *std).expect("validated").inverse_cdf(u),
            Distribution::Uniform { low, high } => low + (high - low) * u,
            Distribution::Triangular { low, mode, high } => {
                let (a, c, b) = (*low, *mode, *high);
                let fc = (c - a) / (b - a);
                if u < fc {
                    a + (u * (b - a) * (c - a)).sqrt()
                } else {
                    b - ((1.0 - u) * (b - a) * (b - c)).sqrt()
                }
            }
            Distribution::DiscreteUniform { values } => values[level(u, values.len())],
            Distribution::Categorical { labels } => level(u, labels.len()) as f64,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            Distribution::Normal { mean, .. } => *mean,
            Distribution::Uniform { low, high } => 0.5 * (low + high),
            Distribution::Triangular { low, mode, high } => (low + mode + high) / 3.0,
            Distribution::DiscreteUniform { values } => values.iter().sum::<f64>() / values.len() as f64,
            Distribution::Categorical { labels } => (labels.len() - 1) as f64 / 2.0,
        }
    }

    pub fn variance(&self) -> f64 {
        match self {
            Distribution::Normal { std, .. } => std * std,
            Distribution::Uniform { low, high } => (high - low).powi(2) / 12.0,
            Distribution::Triangular { low: a, mode: c, high: b } => {
                (a * a + b * b + c * c - a * b - a * c - b * c) / 18.0
            }
            Distribution::DiscreteUniform { values } => {
                let m = self.mean();
                values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / values.len() as f64
            }
            Distribution::Categorical { labels } => {
                let k = labels.len() as f64;
                (k * k - 1.0) / 12.0
            }
        }
    }

    /// Display form of a drawn value (labels for categorical draws).
    pub fn display(&self, value: f64) -> String {
        match self {
            Distribution::Categorical { labels } => {
                labels.get(value as usize).cloned().unwrap_or_else(|| crate::io::fmt_f64(value))
            }
            _ => crate::io::fmt_f64(value),
        }
    }
}

#[inline]
fn level(u: f64, k: usize) -> usize {
    ((u * k as f64) as usize).min(k - 1)
}

/// Named random input of the model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputParameter {
    pub name: String,
    pub distribution: Distribution,
}

impl InputParameter {
    pub fn new(name: impl Into<String>, distribution: Distribution) -> Self {
        Self { name: name.into(), distribution }
    }

    pub fn validate(&self) -> Result<(), GsaError> {
        if self.name.trim().is_empty() {
            return Err(GsaError::InvalidDistribution { name: self.name.clone(), msg: "empty name".into() });
        }
        self.distribution
            .validate()
            .map_err(|msg| GsaError::InvalidDistribution { name: self.name.clone(), msg })
    }
}

pub fn validate_parameters(params: &[InputParameter]) -> Result<(), GsaError> {
    let mut seen = std::collections::HashSet::new();
    for p in params {
        p.validate()?;
        if !seen.insert(p.name.as_str()) {
            return Err(GsaError::InvalidDistribution { name: p.name.clone(), msg: "duplicate parameter name".into() });
        }
    }
    Ok(())
}

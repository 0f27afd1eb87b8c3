use serde::{Deserialize, Serialize};

use crate::error::SolverError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FrictionLaw {
    Manning,
    /// Strickler `K`, equivalent to Manning `n = 1/K`.
    Strickler,
    Chezy,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coefficient {
    Uniform(f64),
    PerCell(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrictionModel {
    pub law: FrictionLaw,
    pub coefficient: Coefficient,
}

impl Default for FrictionModel {
    fn default() -> Self {
        Self::none()
    }
}

impl FrictionModel {
    pub fn none() -> Self {
        Self { law: FrictionLaw::None, coefficient: Coefficient::Uniform(0.0) }
    }

    pub fn manning(n: f64) -> Self {
        Self { law: FrictionLaw::Manning, coefficient: Coefficient::Uniform(n) }
    }

    pub fn validate(&self, ncells: usize) -> Result<(), SolverError> {
        if self.law == FrictionLaw::None {
            return Ok(());
        }
        let ok = |c: f64| c > 0.0 && c.is_finite();
        match &self.coefficient {
            Coefficient::Uniform(c) if ok(*c) => Ok(()),
            Coefficient::PerCell(v) if v.len() == ncells && v.iter().all(|&c| ok(c)) => Ok(()),
            Coefficient::Uniform(c) => Err(SolverError::Invalid(format!("friction coefficient must be positive, got {c}"))),
            Coefficient::PerCell(v) => Err(SolverError::Invalid(format!(
                "per-cell friction needs {ncells} positive values, got {}",
                v.len()
            ))),
        }
    }

    #[inline]
    pub fn coefficient_at(&self, i: usize) -> f64 {
        match &self.coefficient {
            Coefficient::Uniform(c) => *c,
            Coefficient::PerCell(v) => v[i],
        }
    }
}

/// Semi-implicit friction update of `(u, v)` over `dt`.
///
/// `u' = u / (1 + dt·k)` with `k = g n² |U| / h^{4/3}` (Manning),
/// `g |U| / (C² h)` (Chézy). The factor is ≥ 1, so the speed never grows and
/// no component changes sign.
#[inline]
pub fn friction_source(h: f64, u: f64, v: f64, law: FrictionLaw, coefficient: f64, dt: f64, g: f64) -> (f64, f64) {
    let speed = (u * u + v * v).sqrt();
    if h <= 0.0 || speed == 0.0 {
        return (u, v);
    }
    let k = match law {
        FrictionLaw::None => return (u, v),
        FrictionLaw::Manning | FrictionLaw::Strickler => {
            let n = if law == FrictionLaw::Manning { coefficient } else { 1.0 / coefficient };
            if n == 0.0 {
                return (u, v);
            }
            g * n * n * speed / h.powf(4.0 / 3.0)
        }
        FrictionLaw::Chezy => g * speed / (coefficient * coefficient * h),
    };
    let d = 1.0 + dt * k;
    (u / d, v / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn still_or_frictionless_is_unchanged() {
        assert_eq!(friction_source(1.0, 0.0, 0.0, FrictionLaw::Manning, 0.05, 1.0, 9.81), (0.0, 0.0));
        assert_eq!(friction_source(1.0, 1.0, 2.0, FrictionLaw::Manning, 0.0, 1.0, 9.81), (1.0, 2.0));
        assert_eq!(friction_source(1.0, 1.0, 2.0, FrictionLaw::None, 0.05, 1.0, 9.81), (1.0, 2.0));
    }

    #[test]
    fn manning_semi_implicit_value() {
        let (u, v) = friction_source(1.0, 1.0, 0.0, FrictionLaw::Manning, 0.05, 1.0, 9.81);
        assert!((u - 1.0 / 1.024525).abs() < 1e-12);
        assert!((u - 0.9761).abs() < 1e-4);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn strickler_matches_manning() {
        let a = friction_source(0.4, 0.8, -0.3, FrictionLaw::Strickler, 25.0, 0.3, 9.81);
        let b = friction_source(0.4, 0.8, -0.3, FrictionLaw::Manning, 1.0 / 25.0, 0.3, 9.81);
        assert!((a.0 - b.0).abs() < 1e-15 && (a.1 - b.1).abs() < 1e-15);
    }

    #[test]
    fn chezy_value() {
        let (u, _) = friction_source(2.0, 1.0, 0.0, FrictionLaw::Chezy, 30.0, 1.0, 9.81);
        assert!((u - 1.0 / (1.0 + 9.81 / (900.0 * 2.0))).abs() < 1e-15);
    }

    #[test]
    fn never_reverses_or_accelerates() {
        for &(u, v) in &[(3.0, -4.0), (-0.01, 0.02), (100.0, 0.0)] {
            let (u2, v2) = friction_source(0.01, u, v, FrictionLaw::Manning, 0.1, 100.0, 9.81);
            assert!(u2 * u >= 0.0 && v2 * v >= 0.0);
            assert!(u2.hypot(v2) <= u.hypot(v));
        }
    }

    #[test]
    fn validation() {
        assert!(FrictionModel::manning(0.03).validate(4).is_ok());
        assert!(FrictionModel::manning(0.0).validate(4).is_err());
        assert!(FrictionModel::none().validate(4).is_ok());
        let m = FrictionModel { law: FrictionLaw::Chezy, coefficient: Coefficient::PerCell(vec![30.0; 3]) };
        assert!(m.validate(4).is_err());
    }
}

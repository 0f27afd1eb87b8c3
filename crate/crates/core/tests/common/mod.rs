//! Independent reference solutions used as test oracles.
#![allow(dead_code)]

/// Exact solution of the 1D shallow-water Riemann problem for two wet states.
pub struct ExactRiemann {
    pub g: f64,
    pub hl: f64,
    pub ul: f64,
    pub hr: f64,
    pub ur: f64,
    pub h_star: f64,
    pub u_star: f64,
}

impl ExactRiemann {
    pub fn new(hl: f64, ul: f64, hr: f64, ur: f64, g: f64) -> Self {
        assert!(hl > 0.0 && hr > 0.0);
        let f = |h: f64, hk: f64| {
            if h > hk {
                (h - hk) * (0.5 * g * (h + hk) / (h * hk)).sqrt()
            } else {
                2.0 * ((g * h).sqrt() - (g * hk).sqrt())
            }
        };
        let total = |h: f64| f(h, hl) + f(h, hr) + ur - ul;
        // bisection on a bracket; the function is increasing in h
        let (mut lo, mut hi) = (1e-12, 10.0 * (hl + hr) + (ul - ur).abs().powi(2) / g);
        assert!(total(lo) < 0.0 && total(hi) > 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if total(mid) > 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let h_star = 0.5 * (lo + hi);
        let u_star = 0.5 * (ul + ur) + 0.5 * (f(h_star, hr) - f(h_star, hl));
        Self { g, hl, ul, hr, ur, h_star, u_star }
    }

    /// `(h, u)` at similarity coordinate `xi = x / t`.
    pub fn sample(&self, xi: f64) -> (f64, f64) {
        let g = self.g;
        let (cl, cr, cs) = ((g * self.hl).sqrt(), (g * self.hr).sqrt(), (g * self.h_star).sqrt());
        if xi <= self.u_star {
            if self.h_star > self.hl {
                let q = ((self.h_star + self.hl) * self.h_star / (2.0 * self.hl * self.hl)).sqrt();
                if xi < self.ul - cl * q {
                    (self.hl, self.ul)
                } else {
                    (self.h_star, self.u_star)
                }
            } else if xi < self.ul - cl {
                (self.hl, self.ul)
            } else if xi > self.u_star - cs {
                (self.h_star, self.u_star)
            } else {
                let c = (self.ul + 2.0 * cl - xi) / 3.0;
                (c * c / g, xi + c)
            }
        } else if self.h_star > self.hr {
            let q = ((self.h_star + self.hr) * self.h_star / (2.0 * self.hr * self.hr)).sqrt();
            if xi > self.ur + cr * q {
                (self.hr, self.ur)
            } else {
                (self.h_star, self.u_star)
            }
        } else if xi > self.ur + cr {
            (self.hr, self.ur)
        } else if xi < self.u_star + cs {
            (self.h_star, self.u_star)
        } else {
            let c = (-self.ur + 2.0 * cr + xi) / 3.0;
            (c * c / g, xi - c)
        }
    }

    /// Mass flux through the initial discontinuity.
    pub fn interface_mass_flux(&self) -> f64 {
        let (h, u) = self.sample(0.0);
        h * u
    }
}

/// Stoker's wet dam break: depth profile at time `t`, dam at `x0`.
pub fn stoker_depth(hl: f64, hr: f64, g: f64, x0: f64, t: f64, x: f64) -> f64 {
    ExactRiemann::new(hl, 0.0, hr, 0.0, g).sample((x - x0) / t).0
}

/// Cell average of `f` over `[a, b]` by composite midpoint rule.
pub fn cell_average(a: f64, b: f64, samples: usize, f: impl Fn(f64) -> f64) -> f64 {
    let dx = (b - a) / samples as f64;
    (0..samples).map(|k| f(a + (k as f64 + 0.5) * dx)).sum::<f64>() / samples as f64
}

/// Closed-form Sobol indices of the Ishigami function with inputs on U(-pi, pi).
/// Returns (first order, total order).
pub fn ishigami_indices(a: f64, b: f64) -> ([f64; 3], [f64; 3]) {
    let pi = std::f64::consts::PI;
    let v1 = 0.5 * (1.0 + b * pi.powi(4) / 5.0).powi(2);
    let v2 = a * a / 8.0;
    let v13 = b * b * pi.powi(8) * (1.0 / 18.0 - 1.0 / 50.0);
    let var = v1 + v2 + v13;
    ([v1 / var, v2 / var, 0.0], [(v1 + v13) / var, v2 / var, v13 / var])
}

pub fn ishigami(x: &[f64], a: f64, b: f64) -> f64 {
    x[0].sin() + a * x[1].sin().powi(2) + b * x[2].powi(4) * x[0].sin()
}

/// Exhaustive ANOVA first-order indices of `f` over two independent
/// equiprobable discrete inputs.
pub fn anova_first_order(levels1: &[f64], levels2: &[f64], f: impl Fn(f64, f64) -> f64) -> [f64; 2] {
    let n1 = levels1.len() as f64;
    let n2 = levels2.len() as f64;
    let mut all = Vec::new();
    for &a in levels1 {
        for &b in levels2 {
            all.push(f(a, b));
        }
    }
    let mean = all.iter().sum::<f64>() / all.len() as f64;
    let var = all.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / all.len() as f64;
    let v1 = levels1
        .iter()
        .map(|&a| {
            let m = levels2.iter().map(|&b| f(a, b)).sum::<f64>() / n2;
            (m - mean).powi(2)
        })
        .sum::<f64>()
        / n1;
    let v2 = levels2
        .iter()
        .map(|&b| {
            let m = levels1.iter().map(|&a| f(a, b)).sum::<f64>() / n1;
            (m - mean).powi(2)
        })
        .sum::<f64>()
        / n2;
    [v1 / var, v2 / var]
}

//! Physical and numerical fluxes of the shallow-water system.
//!
//! States are expressed in interface-normal coordinates: `un` is the velocity
//! component along the normal, `ut` the tangential one. Flux vectors are
//! `[mass, normal momentum, tangential momentum]`. An x-interface uses
//! `(un, ut) = (u, v)`; a y-interface uses `(v, u)`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CellState {
    pub h: f64,
    pub u: f64,
    pub v: f64,
}

impl CellState {
    pub const DRY: CellState = CellState { h: 0.0, u: 0.0, v: 0.0 };

    pub fn new(h: f64, u: f64, v: f64) -> Self {
        Self { h, u, v }
    }

    /// Same state with the velocity components swapped, i.e. seen from a
    /// y-interface.
    pub fn transposed(self) -> Self {
        Self { h: self.h, u: self.v, v: self.u }
    }
}

pub type Flux = [f64; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxScheme {
    #[default]
    Hll,
    Rusanov,
}

/// x-direction flux `(hu, hu² + gh²/2, huv)`.
#[inline]
pub fn physical_flux(s: CellState, g: f64) -> Flux {
    let q = s.h * s.u;
    [q, q * s.u + 0.5 * g * s.h * s.h, q * s.v]
}

/// y-direction flux `(hv, huv, hv² + gh²/2)`.
pub fn physical_flux_y(s: CellState, g: f64) -> Flux {
    let [m, n, t] = physical_flux(s.transposed(), g);
    [m, t, n]
}

/// Interface flux between two reconstructed states (normal along `u`).
///
/// Both schemes reduce to the physical flux for identical states and return
/// a zero flux between two dry states. Velocities of dry sides are ignored.
#[inline]
pub fn numerical_flux(left: CellState, right: CellState, scheme: FluxScheme, g: f64) -> Flux {
    let (hl, hr) = (left.h, right.h);
    if hl <= 0.0 && hr <= 0.0 {
        return [0.0; 3];
    }
    let l = if hl > 0.0 { left } else { CellState::DRY };
    let r = if hr > 0.0 { right } else { CellState::DRY };
    let (cl, cr) = ((g * l.h).sqrt(), (g * r.h).sqrt());
    let fl = physical_flux(l, g);
    let fr = physical_flux(r, g);
    let ul = [l.h, l.h * l.u, l.h * l.v];
    let ur = [r.h, r.h * r.u, r.h * r.v];

    match scheme {
        FluxScheme::Rusanov => {
            let lambda = (l.u.abs() + cl).max(r.u.abs() + cr);
            std::array::from_fn(|k| 0.5 * (fl[k] + fr[k]) - 0.5 * lambda * (ur[k] - ul[k]))
        }
        FluxScheme::Hll => {
            let (sl, sr) = if l.h <= 0.0 {
                (r.u - 2.0 * cr, r.u + cr)
            } else if r.h <= 0.0 {
                (l.u - cl, l.u + 2.0 * cl)
            } else {
                ((l.u - cl).min(r.u - cr), (l.u + cl).max(r.u + cr))
            };
            if sl >= 0.0 {
                return fl;
            }
            if sr <= 0.0 {
                return fr;
            }
            // centred form: exact for equal states and for mirrored pairs
            let inv = 1.0 / (sr - sl);
            let a = 0.5 * (sr + sl) * inv;
            let b = sl * sr * inv;
            std::array::from_fn(|k| 0.5 * (fl[k] + fr[k]) - a * (fr[k] - fl[k]) + b * (ur[k] - ul[k]))
        }
    }
}

//! Interface reconstructions: hydrostatic (well-balanced) and MUSCL.

use super::flux::CellState;

/// Interface depths `h* = max(0, h + z - max(zL, zR))` for both sides.
///
/// Velocities are carried over unchanged; only depths are modified, so a
/// lake at rest yields identical interface depths on both sides.
#[inline]
pub fn hydrostatic_reconstruction(
    left: CellState,
    right: CellState,
    z_left: f64,
    z_right: f64,
) -> (CellState, CellState) {
    let z_star = z_left.max(z_right);
    let hl = (left.h - (z_star - z_left)).max(0.0);
    let hr = (right.h - (z_star - z_right)).max(0.0);
    (CellState { h: hl, ..left }, CellState { h: hr, ..right })
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Limited linear reconstruction of the centre cell of `(prev, cur, next)`.
///
/// Returns `(face towards prev, face towards next)`.
#[inline]
pub fn muscl_reconstruct(prev: f64, cur: f64, next: f64) -> (f64, f64) {
    let slope = minmod(cur - prev, next - cur);
    (cur - 0.5 * slope, cur + 0.5 * slope)
}

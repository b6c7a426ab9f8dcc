//! Zero and extremum structure of gamma_p on a finite window.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{gamma_p, PExponent, QuadratureSpec};
use crate::error::{domain, Error, Result};
use crate::quad::{brent_root, golden_max};

/// Scan step for sign-change detection.
pub const ZERO_SCAN_STEP: f64 = PI / 8.0;

/// Tolerance in s for located zeros and extrema.
pub const BUMP_S_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extremum {
    pub s: f64,
    /// |gamma_p(s)|
    pub abs_value: f64,
    /// sign of gamma_p on this bump
    pub sign: f64,
}

/// Zeros, interleaved extrema and the landmark maxima x1 (over s >= 3) and
/// x2 (over [2 pi, 3 pi]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpProfile {
    pub p: f64,
    pub s_max: f64,
    pub zeros: Vec<f64>,
    /// extrema[0] is s = 0; extrema[k] lies between zeros[k-1] and zeros[k].
    pub extrema: Vec<Extremum>,
    pub x1: f64,
    pub x2: f64,
}

impl BumpProfile {
    /// Bump k spans [zeros[k-1], zeros[k]] (bump 0 starts at s = 0).
    pub fn bump_bounds(&self, k: usize) -> (f64, f64) {
        let lo = if k == 0 { 0.0 } else { self.zeros[k - 1] };
        let hi = if k < self.zeros.len() { self.zeros[k] } else { self.s_max };
        (lo, hi)
    }
}

/// Scans [0, s_max] for sign changes of gamma_p at step pi/8, refines each
/// zero with Brent and each extremum with golden-section search. Sign
/// changes between values below `spec.abs_tol` are not counted.
///
/// Between consecutive zeros the sampled |gamma_p| must rise then fall; a
/// sampled dip means the scan may have stepped over a pair of zeros and
/// is reported as a resolution error.
pub fn bump_profile(p: &PExponent, s_max: f64, spec: &QuadratureSpec) -> Result<BumpProfile> {
    bump_profile_with_step(p, s_max, ZERO_SCAN_STEP, spec)
}

pub fn bump_profile_with_step(
    p: &PExponent,
    s_max: f64,
    step: f64,
    spec: &QuadratureSpec,
) -> Result<BumpProfile> {
    p.require_at_least(2.0, "bump_profile")?;
    if !(s_max >= 3.0 * PI) || !s_max.is_finite() {
        return Err(domain(format!("bump_profile needs s_max >= 3 pi, got {s_max}")));
    }
    let g = |s: f64| gamma_p(p, s, spec);
    // s_max replaces the last node when it falls on (or within rounding of) one
    let n = (s_max / step * (1.0 - 1e-12)).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|k| if k == n { s_max } else { k as f64 * step }).collect();
    let vals = grid.iter().map(|&s| g(s)).collect::<Result<Vec<f64>>>()?;

    let mut zeros = Vec::new();
    // Indices into the grid at which each bump's samples start.
    let mut bump_starts = vec![0usize];
    for i in 1..grid.len() {
        // below abs_tol the sign of gamma_p is not resolved
        let resolved = vals[i - 1].abs().max(vals[i].abs()) > spec.abs_tol;
        if resolved && vals[i - 1] != 0.0 && vals[i].signum() != vals[i - 1].signum() {
            zeros.push(brent_root(&g, grid[i - 1], grid[i], BUMP_S_TOL, 200)?);
            bump_starts.push(i);
        }
    }
    check_unimodal(&grid, &vals, &bump_starts)?;

    let mut extrema = vec![Extremum { s: 0.0, abs_value: 1.0, sign: 1.0 }];
    for w in zeros.windows(2) {
        let (a, b) = (w[0], w[1]);
        let sign = g(0.5 * (a + b))?.signum();
        let (s, v) = golden_max(|s| Ok(g(s)?.abs()), a, b, BUMP_S_TOL.max(1e-9))?;
        extrema.push(Extremum { s, abs_value: v, sign });
    }

    let abs_at = |s: f64| -> Result<f64> { Ok(g(s)?.abs()) };
    let mut x1 = abs_at(3.0)?.max(abs_at(s_max)?);
    let mut x2 = abs_at(2.0 * PI)?.max(abs_at(3.0 * PI)?);
    for e in &extrema {
        if e.s >= 3.0 {
            x1 = x1.max(e.abs_value);
        }
        if e.s >= 2.0 * PI && e.s <= 3.0 * PI {
            x2 = x2.max(e.abs_value);
        }
    }
    Ok(BumpProfile { p: p.value(), s_max, zeros, extrema, x1, x2 })
}

/// Below this |gamma_p| is at the level of quadrature noise.
const DIP_NOISE_FLOOR: f64 = 1e-12;

fn check_unimodal(grid: &[f64], vals: &[f64], starts: &[usize]) -> Result<()> {
    let mut ends: Vec<usize> = starts[1..].to_vec();
    ends.push(grid.len());
    for (&a, &b) in starts.iter().zip(ends.iter()) {
        let seg: Vec<f64> = vals[a..b].iter().map(|v| v.abs()).collect();
        let mut falling = false;
        for w in seg.windows(2) {
            if w[1] < w[0] {
                falling = true;
            } else if falling && w[1] > w[0] && w[0] > DIP_NOISE_FLOOR {
                let s = grid[a];
                return Err(Error::Resolution(format!(
                    "|gamma_p| dips without a sign change in the bump starting near s = {s:.4}; \
                     refine the scan step"
                )));
            }
        }
    }
    Ok(())
}

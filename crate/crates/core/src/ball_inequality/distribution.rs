//! Distribution functions F(x) = measure{s > 0 : f(s) > x} of |gamma_p|,
//! of |sin s / s| and of Gaussians, with certified lower and upper values.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::constants::d_p;
use crate::error::{domain, Error, Result};
use crate::gamma_p::{
    boyd_envelope, bump_profile, gamma_p, three_sinc_n, tail_asymptote, tail_threshold, BumpProfile, PExponent,
    QuadratureSpec,
};
use crate::quad::brent_root;

/// Tolerance in s for each located crossing.
pub const CROSSING_XTOL: f64 = 1e-10;

/// Samples per monotone branch used to bracket crossings.
const BRANCH_SAMPLES: usize = 17;

/// What was assumed about s > s_max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailModel {
    /// The curve is exact or complete; nothing beyond the computed range.
    Complete,
    /// p off the even integers: the three-sinc envelope up to the power-law
    /// threshold, then the tail term within a factor [1/2, 3/2].
    PowerLaw { s_max: f64, threshold: f64 },
    /// Even integer p: twice the Boyd envelope as the upper value, zero as the lower.
    EvenEnvelope { s_max: f64 },
}

/// Sampled nonincreasing distribution function with lower and upper values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionCurve {
    pub grid: Vec<f64>,
    pub value_lo: Vec<f64>,
    pub value_hi: Vec<f64>,
    pub tail_model: TailModel,
    /// Lower and upper values of int_0^inf f(s)^2 ds.
    pub norm_sq: (f64, f64),
}

impl DistributionCurve {
    fn from_bounds(mut pts: Vec<(f64, f64, f64)>, tail_model: TailModel, norm_sq: (f64, f64)) -> Self {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        // F is nonincreasing: hi(x) <= hi(x') for x' < x and lo(x) >= lo(x') for x' > x.
        for i in 1..pts.len() {
            pts[i].2 = pts[i].2.min(pts[i - 1].2);
        }
        for i in (0..pts.len().saturating_sub(1)).rev() {
            pts[i].1 = pts[i].1.max(pts[i + 1].1);
        }
        DistributionCurve {
            grid: pts.iter().map(|t| t.0).collect(),
            value_lo: pts.iter().map(|t| t.1).collect(),
            value_hi: pts.iter().map(|t| t.2).collect(),
            tail_model,
            norm_sq,
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if n == 0 || self.value_lo.len() != n || self.value_hi.len() != n {
            return Err(Error::Validation("distribution curve has mismatched or empty columns".into()));
        }
        for i in 0..n {
            let x = self.grid[i];
            if !(x > 0.0 && x < 1.0) || (i > 0 && x <= self.grid[i - 1]) {
                return Err(Error::Validation(format!("grid must increase inside (0, 1), bad x = {x}")));
            }
            if self.value_lo[i] > self.value_hi[i] {
                return Err(Error::Validation(format!("lo > hi at x = {x}")));
            }
        }
        Ok(())
    }
}

fn check_level(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("distribution level must be positive, got {x}")))
    }
}

/// G(x) = sqrt(ln(1/x) / coeff), the distribution function of exp(-coeff s^2).
pub fn distribution_g(x: f64, coeff: f64) -> Result<f64> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("distribution_g needs 0 < x < 1, got {x}")));
    }
    if !(coeff > 0.0) {
        return Err(domain(format!("distribution_g needs coeff > 0, got {coeff}")));
    }
    Ok(((1.0 / x).ln() / coeff).sqrt())
}

pub fn distribution_g_curve(xs: &[f64], coeff: f64) -> Result<DistributionCurve> {
    let pts = xs
        .iter()
        .map(|&x| distribution_g(x, coeff).map(|g| (x, g, g)))
        .collect::<Result<Vec<_>>>()?;
    let n2 = 0.5 * (PI / (2.0 * coeff)).sqrt();
    Ok(DistributionCurve::from_bounds(pts, TailModel::Complete, (n2, n2)))
}

/// One monotone piece of |gamma_p| between a zero and an extremum.
#[derive(Debug, Clone)]
struct Branch {
    s: Vec<f64>,
    v: Vec<f64>,
    rising: bool,
}

impl Branch {
    fn peak(&self) -> f64 {
        if self.rising {
            *self.v.last().unwrap()
        } else {
            self.v[0]
        }
    }
}

/// Super-level sets of |gamma_p| resolved on [0, s_max] from a bump profile,
/// with a tail model beyond. Read-only once built, so it can be shared across
/// threads for many levels x.
#[derive(Debug, Clone)]
pub struct GammaLevelSets {
    p: PExponent,
    spec: QuadratureSpec,
    profile: BumpProfile,
    /// Branches in order: bump 0 falling, then rising/falling pairs.
    branches: Vec<Branch>,
    last_zero: f64,
    tail: TailModel,
}

impl GammaLevelSets {
    /// Resolves all bumps whose height may exceed x_min / 2.
    pub fn new(p: &PExponent, x_min: f64, spec: &QuadratureSpec) -> Result<Self> {
        p.require_at_least(15.0, "distribution_F")?;
        if p.value() >= crate::gamma_p::P_INFINITY_PROXY {
            return Err(Error::Regime("use f_sinc_distribution for p = inf".into()));
        }
        if !(x_min > 0.0 && x_min < 1.0) {
            return Err(domain(format!("x_min must lie in (0, 1), got {x_min}")));
        }
        let pv = p.value();
        let cap = (60.0 * pv).max(16.0 * PI);
        let mut s_max = initial_s_max(pv, x_min).clamp(8.0 * PI, cap);
        let profile = loop {
            let prof = bump_profile(p, s_max, spec)?;
            let tail_max = prof.extrema.iter().rev().take(3).map(|e| e.abs_value).fold(0.0, f64::max);
            if prof.extrema.len() > 3 && tail_max < 0.5 * x_min || s_max >= cap {
                break prof;
            }
            s_max = (1.5 * s_max).min(cap);
        };
        let last_zero = *profile
            .zeros
            .last()
            .ok_or_else(|| Error::Resolution("no zero of gamma_p found".into()))?;

        let g = |s: f64| gamma_p(p, s, spec).map(f64::abs);
        let sample = |a: f64, b: f64, va: f64, vb: f64, rising: bool| -> Result<Branch> {
            let n = BRANCH_SAMPLES;
            let mut s = Vec::with_capacity(n);
            let mut v = Vec::with_capacity(n);
            for i in 0..n {
                let t = a + (b - a) * i as f64 / (n - 1) as f64;
                s.push(t);
                v.push(if i == 0 {
                    va
                } else if i == n - 1 {
                    vb
                } else {
                    g(t)?
                });
            }
            Ok(Branch { s, v, rising })
        };
        let mut branches = vec![sample(0.0, profile.zeros[0], 1.0, 0.0, false)?];
        for k in 1..profile.zeros.len() {
            let e = profile.extrema[k];
            branches.push(sample(profile.zeros[k - 1], e.s, 0.0, e.abs_value, true)?);
            branches.push(sample(e.s, profile.zeros[k], e.abs_value, 0.0, false)?);
        }

        let tail = if p.is_even_integer() {
            TailModel::EvenEnvelope { s_max: last_zero }
        } else {
            TailModel::PowerLaw { s_max: last_zero, threshold: tail_threshold(p)? }
        };
        Ok(GammaLevelSets { p: *p, spec: *spec, profile, branches, last_zero, tail })
    }

    pub fn profile(&self) -> &BumpProfile {
        &self.profile
    }

    pub fn s_max(&self) -> f64 {
        self.last_zero
    }

    pub fn tail_model(&self) -> TailModel {
        self.tail
    }

    fn crossing(&self, br: &Branch, x: f64) -> Result<f64> {
        let n = br.v.len();
        // bracket [s_i, s_{i+1}] with the level between the sampled values,
        // searched from the peak end so noise near the zero is ignored
        let i = if br.rising {
            (0..n - 1).rev().find(|&i| br.v[i] <= x).unwrap_or(0)
        } else {
            (0..n - 1).find(|&i| br.v[i + 1] <= x).unwrap_or(n - 2)
        };
        let (a, b) = (br.s[i], br.s[i + 1]);
        if br.v[i] == x {
            return Ok(a);
        }
        if br.v[i + 1] == x {
            return Ok(b);
        }
        brent_root(|s| Ok(gamma_p(&self.p, s, &self.spec)?.abs() - x), a, b, CROSSING_XTOL, 200)
    }

    /// All s in (0, s_max] with |gamma_p(s)| = x, ascending.
    pub fn crossings(&self, x: f64) -> Result<Vec<f64>> {
        check_level(x)?;
        let mut out = Vec::new();
        for br in &self.branches {
            if br.peak() > x {
                out.push(self.crossing(br, x)?);
            }
        }
        Ok(out)
    }

    /// Measure of {s in (0, s_max] : |gamma_p(s)| > x} and the number of crossings used.
    fn resolved_measure(&self, x: f64) -> Result<(f64, usize)> {
        let mut total = 0.0;
        let mut count = 0;
        let mut left = 0.0;
        for br in &self.branches {
            if br.peak() <= x {
                continue;
            }
            let c = self.crossing(br, x)?;
            count += 1;
            if br.rising {
                left = c;
            } else {
                total += c - left;
            }
        }
        Ok((total, count))
    }

    /// (lo, hi) values of F(x) for |gamma_p|.
    pub fn measure(&self, x: f64) -> Result<(f64, f64)> {
        check_level(x)?;
        if x >= 1.0 {
            return Ok((0.0, 0.0));
        }
        let (m, count) = self.resolved_measure(x)?;
        let slack = count as f64 * CROSSING_XTOL;
        let (tail_lo, tail_hi) = self.tail_measure(x)?;
        Ok(((m - slack).max(0.0) + tail_lo, m + slack + tail_hi))
    }

    fn tail_measure(&self, x: f64) -> Result<(f64, f64)> {
        let z = self.last_zero;
        match self.tail {
            TailModel::EvenEnvelope { .. } => {
                let f = |s: f64| 2.0 * boyd_envelope(&self.p, s).unwrap_or(0.0) - x;
                if f(z) <= 0.0 {
                    return Ok((0.0, 0.0));
                }
                let mut b = 2.0 * z;
                while f(b) > 0.0 {
                    b *= 2.0;
                }
                let s = brent_root(|s| Ok(f(s)), z, b, CROSSING_XTOL, 200)?;
                Ok((0.0, s - z))
            }
            TailModel::PowerLaw { threshold, .. } => {
                let pv = self.p.value();
                let norm = self.p.gamma_norm();
                // |Gamma gamma_p| <= 1/s + 1/(N p) everywhere
                let floor = 1.0 / (three_sinc_n(pv)? * pv);
                let mid = if threshold <= z {
                    0.0
                } else if x * norm <= floor {
                    threshold - z
                } else {
                    (1.0 / (x * norm - floor) - z).clamp(0.0, threshold - z)
                };
                let c = tail_asymptote(&self.p, 1.0)?.abs();
                let start = threshold.max(z);
                let reach = |k: f64| (((k * c).ln() - x.ln()) / (pv + 1.0)).exp();
                let hi = mid + (reach(1.5) - start).max(0.0);
                let lo = (reach(0.5) - start).max(0.0);
                Ok((lo, hi))
            }
            TailModel::Complete => Ok((0.0, 0.0)),
        }
    }
}

/// Starting guess for the resolved range: where the Boyd envelope of the
/// nearest even exponent falls to x_min / 4.
fn initial_s_max(p: f64, x_min: f64) -> f64 {
    let pe = (2.0 * (p / 2.0).round()).max(4.0);
    let pe = PExponent::new(pe).unwrap();
    let target = 0.25 * x_min;
    let mut s = 16.0 * PI;
    while s < 1e5 && boyd_envelope(&pe, s).unwrap_or(0.0) > target {
        s *= 1.25;
    }
    s
}

/// The distribution function of |gamma_p| at each x, with lower and upper values.
pub fn distribution_f(p: &PExponent, xs: &[f64], spec: &QuadratureSpec) -> Result<DistributionCurve> {
    for &x in xs {
        check_level(x)?;
    }
    let inside: Vec<f64> = xs.iter().copied().filter(|&x| x < 1.0).collect();
    let x_min = inside.iter().copied().fold(0.5, f64::min);
    let sets = GammaLevelSets::new(p, x_min, spec)?;
    distribution_f_with(&sets, &inside)
}

/// As [`distribution_f`], reusing resolved level sets.
pub fn distribution_f_with(sets: &GammaLevelSets, xs: &[f64]) -> Result<DistributionCurve> {
    let pts = xs
        .par_iter()
        .map(|&x| sets.measure(x).map(|(lo, hi)| (x, lo, hi)))
        .collect::<Result<Vec<_>>>()?;
    // Plancherel: int gamma_p^2 = (1/2) sqrt(pi / (2 d_p))
    let n2 = 0.5 * (PI / (2.0 * d_p(sets.p.value()))).sqrt();
    Ok(DistributionCurve::from_bounds(pts, sets.tail, (n2, n2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FSinc {
    pub x: f64,
    pub numeric: f64,
    /// (2/pi)/x - 27/16
    pub lower_bound: f64,
    /// The bound is stated for x < 1/(2 pi) only.
    pub bound_applies: bool,
}

/// Measure of {s > 0 : |sin s / s| > x} and the number of crossings located.
fn sinc_measure(x: f64) -> Result<(f64, usize)> {
    if x >= 1.0 {
        return Ok((0.0, 0));
    }
    let tol = |s: f64| 1e-13 * s.max(1.0);
    let sinc = |s: f64| if s == 0.0 { 1.0 } else { s.sin() / s };
    let first = brent_root(|s| Ok(sinc(s) - x), 0.0, PI, tol(PI), 200)?;
    let mut total = first;
    let mut count = 1;
    let mut m = 1.0;
    loop {
        let a = m * PI;
        // the period's maximum solves tan s = s in (m pi, (m + 1/2) pi)
        let peak = brent_root(|s| Ok(s * s.cos() - s.sin()), a, a + 0.5 * PI, tol(a), 200)?;
        let top = (peak.sin() / peak).abs();
        if top <= x {
            break;
        }
        let f = |s: f64| Ok((s.sin() / s).abs() - x);
        let lo = brent_root(f, a, peak, tol(a), 200)?;
        let hi = brent_root(f, peak, a + PI, tol(a), 200)?;
        total += hi - lo;
        count += 2;
        m += 1.0;
    }
    Ok((total, count))
}

/// F_sinc(x) computed period by period, and the lower bound (2/pi)/x - 27/16.
pub fn f_sinc_distribution(x: f64) -> Result<FSinc> {
    if !(x > 0.0 && x < 1.0) {
        return Err(domain(format!("f_sinc_distribution needs 0 < x < 1, got {x}")));
    }
    Ok(FSinc {
        x,
        numeric: sinc_measure(x)?.0,
        lower_bound: 2.0 / (PI * x) - 27.0 / 16.0,
        bound_applies: x < 1.0 / (2.0 * PI),
    })
}

pub fn f_sinc_curve(xs: &[f64]) -> Result<DistributionCurve> {
    let pts = xs
        .par_iter()
        .map(|&x| {
            check_level(x)?;
            let (m, n) = sinc_measure(x)?;
            let slack = n as f64 * 1e-13 * (n as f64 * PI).max(1.0);
            Ok((x, (m - slack).max(0.0), m + slack))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DistributionCurve::from_bounds(pts, TailModel::Complete, (PI / 2.0, PI / 2.0)))
}

//! The normalised cosine transform
//!
//! gamma_p(s) = Gamma(1 + 1/p)^-1 * int_0^inf cos(s r) exp(-r^p) dr
//!
//! and its first two derivatives. Small and moderate s use direct
//! quadrature split at the kernel half-periods; beyond the contour switch
//! (for p off the even integers) the integral is taken along a rotated ray
//! where the integrand decays monotonically instead of oscillating.

mod approx;
mod bumps;

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use approx::*;
pub use bumps::*;

use crate::error::{domain, Error, Result};
use crate::quad::{integrate_breaks, Tol};
use crate::special_fn::{gamma, gamma_norm};

/// Stand-in for p = infinity where a finite exponent is required.
pub const P_INFINITY_PROXY: f64 = 1e6;

/// Contour rotation angle as a fraction of pi/2. The full quarter turn
/// leaves exp(-i r^p) undamped, so stay slightly inside it.
const CONTOUR_THETA_FRAC: f64 = 0.9;

/// A validated exponent with its parity metadata.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PExponent {
    p: f64,
    dist_even: f64,
    is_even_integer: bool,
}

impl PExponent {
    /// Accepts finite p >= 1 (sections allow 1 <= p < 2).
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(domain(format!("exponent p = {p} must be finite and >= 1")));
        }
        let k = (p / 2.0).round().max(1.0);
        let dist_even = (p - 2.0 * k).abs();
        Ok(PExponent { p, dist_even, is_even_integer: dist_even == 0.0 })
    }

    pub fn value(&self) -> f64 {
        self.p
    }

    /// min over k >= 1 of |p - 2k|.
    pub fn dist_even(&self) -> f64 {
        self.dist_even
    }

    pub fn is_even_integer(&self) -> bool {
        self.is_even_integer
    }

    /// Gamma(1 + 1/p).
    pub fn gamma_norm(&self) -> f64 {
        gamma_norm(self.p)
    }

    pub(crate) fn require_at_least(&self, min: f64, op: &str) -> Result<()> {
        if self.p < min {
            Err(domain(format!("{op} requires p >= {min}, got {}", self.p)))
        } else {
            Ok(())
        }
    }
}

/// Tolerances and truncation policy for every integral in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Integrand envelope below which the r-range is truncated.
    pub envelope_cut: f64,
    /// s beyond which the rotated-contour evaluator takes over. `None`
    /// selects [`default_contour_switch`] for the exponent at hand.
    pub contour_switch_s: Option<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-12,
            abs_tol: 1e-15,
            envelope_cut: 1e-18,
            contour_switch_s: None,
            max_subdivisions: 200_000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        let switch_ok = self.contour_switch_s.map_or(true, |s| s > 0.0);
        if self.rel_tol > 0.0
            && self.abs_tol > 0.0
            && self.envelope_cut > 0.0
            && self.envelope_cut < 1.0
            && switch_ok
            && self.max_subdivisions > 0
        {
            Ok(())
        } else {
            Err(domain(format!("invalid quadrature spec {self:?}")))
        }
    }

    /// Same spec with looser tolerances, for inner evaluations whose
    /// errors are dominated elsewhere.
    pub fn with_tol(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn switch_for(&self, p: &PExponent) -> f64 {
        self.contour_switch_s.unwrap_or_else(|| default_contour_switch(p.value()))
    }
}

/// Default direct/contour switch: max(min(3p, 60), p^2 / 2).
///
/// Along the rotated ray the integrand mass exceeds the result by roughly
/// (2p^2 / (pi e s))^p, so the ray only pays off once s is of order p^2.
pub fn default_contour_switch(p: f64) -> f64 {
    (3.0 * p).min(60.0).max(0.5 * p * p)
}

/// Which kernel: 0 for gamma_p, 1 and 2 for its derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Order {
    Zero,
    One,
    Two,
}

impl Order {
    fn from_u8(order: u8) -> Result<Self> {
        match order {
            0 => Ok(Order::Zero),
            1 => Ok(Order::One),
            2 => Ok(Order::Two),
            _ => Err(domain(format!("derivative order {order} not in {{1, 2}}"))),
        }
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("s = {s} must be finite and >= 0")))
    }
}

/// gamma_p(s).
pub fn gamma_p(p: &PExponent, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    eval(p, s, Order::Zero, spec)
}

/// d^order/ds^order gamma_p(s), order in {1, 2}, from dedicated kernels.
pub fn gamma_p_deriv(p: &PExponent, s: f64, order: u8, spec: &QuadratureSpec) -> Result<f64> {
    if order == 0 {
        return Err(domain("derivative order must be 1 or 2"));
    }
    eval(p, s, Order::from_u8(order)?, spec)
}

fn eval(p: &PExponent, s: f64, order: Order, spec: &QuadratureSpec) -> Result<f64> {
    check_s(s)?;
    spec.validate()?;
    if s == 0.0 {
        return Ok(match order {
            Order::Zero => 1.0,
            Order::One => 0.0,
            Order::Two => -2.0 * second_moment_coef(p.value()),
        });
    }
    if !p.is_even_integer() && s > spec.switch_for(p) {
        contour(p, s, order, spec)
    } else {
        direct(p, s, order, spec)
    }
}

/// c_p = Gamma(1 + 3/p) / (6 Gamma(1 + 1/p)), so gamma_p(s) = 1 - c_p s^2 + O(s^4).
pub(crate) fn second_moment_coef(p: f64) -> f64 {
    gamma(1.0 + 3.0 / p).expect("positive") / (6.0 * gamma_norm(p))
}

/// Direct period-split quadrature regardless of the contour switch.
pub fn gamma_p_direct(p: &PExponent, s: f64, order: u8, spec: &QuadratureSpec) -> Result<f64> {
    check_s(s)?;
    spec.validate()?;
    direct(p, s, Order::from_u8(order)?, spec)
}

fn direct(p: &PExponent, s: f64, order: Order, spec: &QuadratureSpec) -> Result<f64> {
    let pv = p.value();
    let norm = p.gamma_norm();
    let big_r = (-spec.envelope_cut.ln()).powf(1.0 / pv);
    // Below r_flat, 1 - exp(-r^p) < 1e-17 and the weight is exactly 1 in
    // double precision, so that stretch is done in closed form.
    let r_flat = 1e-17f64.powf(1.0 / pv);
    let sa = s * r_flat;
    let (head, start) = match order {
        Order::Zero => ((sa).sin() / s, r_flat),
        Order::One if sa >= 1.0 => (-(sa.sin() - sa * sa.cos()) / (s * s), r_flat),
        Order::Two if sa >= 1.0 => (-((sa * sa - 2.0) * sa.sin() + 2.0 * sa * sa.cos()) / (s * s * s), r_flat),
        _ => (0.0, 0.0),
    };
    let breaks = direct_breaks(pv, s, start, big_r);
    let tol = Tol::new(spec.abs_tol * norm, spec.rel_tol);
    let max_panels = spec.max_subdivisions + breaks.len();
    let out = match order {
        Order::Zero => integrate_breaks(&|r: f64| (s * r).cos() * (-r.powf(pv)).exp(), &breaks, tol, max_panels),
        Order::One => integrate_breaks(&|r: f64| -(s * r).sin() * r * (-r.powf(pv)).exp(), &breaks, tol, max_panels),
        Order::Two => integrate_breaks(&|r: f64| -(s * r).cos() * r * r * (-r.powf(pv)).exp(), &breaks, tol, max_panels),
    };
    match out {
        Ok(o) => Ok((head + o.value) / norm),
        Err(Error::Quadrature { value, achieved }) => {
            Err(Error::Quadrature { value: (head + value) / norm, achieved: achieved / norm })
        }
        Err(e) => Err(e),
    }
}

/// Half-period breakpoints on [start, big_r] plus landmarks around r = 1
/// where exp(-r^p) turns over on a 1/p scale.
fn direct_breaks(p: f64, s: f64, start: f64, big_r: f64) -> Vec<f64> {
    let half = PI / s;
    let mut b = vec![start];
    let mut k = (start / half).floor() + 1.0;
    while k * half < big_r {
        b.push(k * half);
        k += 1.0;
    }
    if p >= 4.0 {
        for j in -8..=3 {
            let r = 1.0 + j as f64 / p;
            if r > start && r < big_r {
                b.push(r);
            }
        }
    }
    b.push(big_r);
    b.sort_by(f64::total_cmp);
    let min_gap = 1e-9 * big_r;
    let mut out: Vec<f64> = Vec::with_capacity(b.len());
    for x in b {
        if out.last().map_or(true, |&l| x - l > min_gap) {
            out.push(x);
        }
    }
    if let Some(l) = out.last_mut() {
        *l = big_r;
    }
    out
}

/// Rotated-contour evaluation of gamma_p(s). Requires p off the even integers.
pub fn gamma_p_tail(p: &PExponent, s: f64, spec: &QuadratureSpec) -> Result<f64> {
    if p.is_even_integer() {
        return Err(Error::Regime(format!(
            "p = {} is an even integer: there is no power-law tail; use boyd_asymptotic",
            p.value()
        )));
    }
    check_s(s)?;
    if s == 0.0 {
        return Err(domain("the contour representation needs s > 0"));
    }
    spec.validate()?;
    contour(p, s, Order::Zero, spec)
}

/// Derivatives along the rotated contour (same preconditions as [`gamma_p_tail`]).
pub fn gamma_p_tail_deriv(p: &PExponent, s: f64, order: u8, spec: &QuadratureSpec) -> Result<f64> {
    if p.is_even_integer() {
        return Err(Error::Regime(format!("p = {} is an even integer", p.value())));
    }
    check_s(s)?;
    if s == 0.0 || order == 0 {
        return Err(domain("contour derivatives need s > 0 and order 1 or 2"));
    }
    spec.validate()?;
    contour(p, s, Order::from_u8(order)?, spec)
}

/// With J_k(s) = int_0^inf t^(p-1+k) exp(i s t - t^p) dt, integration by
/// parts gives Gamma(1+1/p) gamma_p(s) = (p / s) Im J_0, and
/// differentiating in s (J_0' = i J_1, J_1' = i J_2) gives the derivatives.
fn contour(p: &PExponent, s: f64, order: Order, spec: &QuadratureSpec) -> Result<f64> {
    let pv = p.value();
    let norm = p.gamma_norm();
    let scale = norm * s.min(1.0).powi(3) / pv;
    let tol = Tol::new(spec.abs_tol * scale, spec.rel_tol);
    let j0 = contour_moment(pv, s, 0, tol, spec.max_subdivisions)?;
    let v = match order {
        Order::Zero => pv / s * j0.im,
        Order::One => {
            let j1 = contour_moment(pv, s, 1, tol, spec.max_subdivisions)?;
            pv * (-j0.im / (s * s) + j1.re / s)
        }
        Order::Two => {
            let j1 = contour_moment(pv, s, 1, tol, spec.max_subdivisions)?;
            let j2 = contour_moment(pv, s, 2, tol, spec.max_subdivisions)?;
            pv * (2.0 * j0.im / (s * s * s) - 2.0 * j1.re / (s * s) - j2.im / s)
        }
    };
    Ok(v / norm)
}

/// J_k along t = tau e^{i phi}, phi = theta / p. On the ray
/// |integrand| = tau^m exp(-s tau sin(phi) - tau^p cos(theta)), m = p - 1 + k.
fn contour_moment(p: f64, s: f64, k: u8, tol: Tol, max_sub: usize) -> Result<Complex64> {
    let theta = CONTOUR_THETA_FRAC * FRAC_PI_2;
    let phi = theta / p;
    let (sin_phi, cos_phi) = phi.sin_cos();
    let (sin_th, cos_th) = theta.sin_cos();
    let m = p - 1.0 + k as f64;
    let log_mag = |t: f64| m * t.ln() - s * t * sin_phi - t.powf(p) * cos_th;
    let slope = |t: f64| m / t - s * sin_phi - p * cos_th * t.powf(p - 1.0);

    // Peak of the envelope (slope is decreasing in t).
    let (mut lo, mut hi) = (1e-300f64, 1.0f64);
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    let t_peak = if m == 0.0 {
        lo
    } else {
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if slope(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo < 1.0 + 1e-10 {
                break;
            }
        }
        hi
    };
    let peak = log_mag(t_peak.max(1e-300));
    // Truncate where the envelope is e^-48 below its peak.
    // Small steps: past the peak tau^p grows by e^(1/2) per step at most.
    let grow = 1.0 + 0.5 / p.max(1.0);
    let mut t_end = t_peak.max(1e-3 / (s * sin_phi));
    while log_mag(t_end) > peak - 48.0 {
        t_end *= grow;
    }

    // Panels no wider than half a period of the phase s tau cos(phi) - tau^p sin(theta).
    let mut breaks = vec![0.0];
    let mut t: f64 = 0.0;
    let max_w = t_end / 8.0;
    while t < t_end {
        let omega = |x: f64| s * cos_phi + p * sin_th * x.powf(p - 1.0);
        let mut w = (PI / omega(t)).min(max_w);
        w = (PI / omega(t + w)).min(max_w).max(t_end * 1e-6);
        t = (t + w).min(t_end);
        breaks.push(t);
        if breaks.len() > max_sub {
            return Err(Error::Quadrature { value: f64::NAN, achieved: f64::INFINITY });
        }
    }

    let f = |tau: f64| {
        if tau == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        let re = m * tau.ln() - s * tau * sin_phi - tau.powf(p) * cos_th;
        let im = s * tau * cos_phi - tau.powf(p) * sin_th;
        Complex64::from_polar(re.exp(), im)
    };
    let out = integrate_breaks(&f, &breaks, tol, max_sub + breaks.len())?;
    let prefactor = Complex64::from_polar(1.0, (m + 1.0) * phi);
    Ok(prefactor * out.value)
}

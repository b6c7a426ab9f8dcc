//! The Ball-type integral h_p(u) = sqrt(u) int_0^inf |gamma_p(s)|^u ds, its
//! slope at u = 2, and the distribution-function comparison behind the bound
//! h_p(u) <= max(h_p(2), h_p(inf)).

mod distribution;
mod np;

pub use distribution::*;
pub use np::*;

use std::cell::RefCell;
use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constants::d_p;
use crate::error::{domain, Error, Result};
use crate::gamma_p::{boyd_envelope, gamma_p, tail_asymptote, tail_threshold, PExponent, QuadratureSpec};
use crate::quad::{brent_root, golden_max, integrate_breaks, Tol};
use crate::special_fn::{gamma, ln_gamma};

const SCAN_STEP: f64 = PI / 8.0;
const BLOCK_LEN: f64 = 4.0 * PI;
/// Blocks are never stopped before this point, whatever the remainder estimate says.
const MIN_END: f64 = 8.0 * PI;
/// Above this u the first arch is integrated in t = s sqrt(u).
const LARGE_U: f64 = 100.0;

/// How the part of the integral beyond the last block was handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TailKind {
    /// Past the power-law threshold: the tail term is added and bounded rigorously.
    PowerLaw,
    /// Even integer p: bounded by twice the Boyd envelope, with no rigorous error.
    EvenEnvelope,
    /// Extrapolated from the decay of the last block.
    DecayModel,
    /// Block cap reached; the remainder of a sinc-like tail was added.
    SincModel,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpEstimate {
    pub p: f64,
    pub u: f64,
    pub value: f64,
    /// Bound on the truncated tail (already scaled by sqrt(u)).
    pub tail_bound: f64,
    pub quad_err: f64,
    pub s_end: f64,
    pub tail: TailKind,
    /// Set when the requested tolerance could not be reached.
    pub degraded: bool,
}

impl HpEstimate {
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.quad_err
    }
}

struct Accumulated {
    value: f64,
    quad_err: f64,
    s_end: f64,
    remainder: f64,
    capped: bool,
    degraded: bool,
}

/// Sign changes of gamma_p on [a, b], refined with Brent.
/// Values below this are treated as quadrature noise when scanning for zeros.
const ZERO_NOISE: f64 = 1e-13;

pub(crate) fn zeros_in(p: &PExponent, spec: &QuadratureSpec, a: f64, b: f64) -> Result<Vec<f64>> {
    let g = |s: f64| gamma_p(p, s, spec);
    let n = ((b - a) / SCAN_STEP).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    let mut out = Vec::new();
    let mut prev = g(a)?;
    for i in 1..=n {
        let s = if i == n { b } else { a + h * i as f64 };
        let v = g(s)?;
        // sign flips of pure rounding noise are not zeros
        let resolved = prev.abs().max(v.abs()) > ZERO_NOISE;
        if resolved && prev != 0.0 && v != 0.0 && prev.signum() != v.signum() {
            out.push(brent_root(g, s - h, s, 1e-12, 200)?);
        }
        prev = v;
    }
    Ok(out)
}

/// int_a^b phi(gamma_p(s)) ds split at the zeros of gamma_p. Returns
/// (value, error, degraded).
fn block_integral(
    p: &PExponent,
    spec: &QuadratureSpec,
    a: f64,
    b: f64,
    phi: &dyn Fn(f64) -> f64,
    tol_abs: f64,
    scale: f64,
) -> Result<(f64, f64, bool)> {
    // `scale` > 1 integrates in t = s * scale over [a, b] * scale.
    let mut breaks = vec![a * scale];
    if scale > 1.0 {
        let mut t = 0.25;
        while t < b * scale {
            if t > a * scale {
                breaks.push(t);
            }
            t *= 2.0;
        }
    }
    breaks.extend(zeros_in(p, spec, a, b)?.into_iter().map(|z| z * scale));
    breaks.push(b * scale);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |t: f64| match gamma_p(p, t / scale, spec) {
        Ok(v) => phi(v),
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            0.0
        }
    };
    let out = integrate_breaks(&f, &breaks, Tol::new(tol_abs * scale, spec.rel_tol), 20_000);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    match out {
        Ok(o) => Ok((o.value / scale, o.abs_err / scale, false)),
        Err(Error::Quadrature { value, achieved }) => Ok((value / scale, achieved / scale, true)),
        Err(e) => Err(e),
    }
}

/// int_0^S phi(gamma_p) over blocks of length 4 pi until the remainder, modelled as
/// a tail decaying like s^-decay, is below tolerance or S reaches s_cap.
fn accumulate(
    p: &PExponent,
    spec: &QuadratureSpec,
    decay: f64,
    phi: &dyn Fn(f64) -> f64,
    first_scale: f64,
    s_cap: f64,
) -> Result<Accumulated> {
    let (v0, e0, d0) = block_integral(p, spec, 0.0, PI, phi, spec.abs_tol, first_scale)?;
    let target = spec.abs_tol.max(spec.rel_tol * v0.abs());
    let mut acc = Accumulated {
        value: v0,
        quad_err: e0,
        s_end: PI,
        remainder: f64::INFINITY,
        capped: false,
        degraded: d0,
    };
    let mut a = PI;
    loop {
        if a >= s_cap {
            acc.capped = true;
            break;
        }
        let b = (a + BLOCK_LEN).min(s_cap);
        let (v, e, d) = block_integral(p, spec, a, b, phi, 0.02 * target, 1.0)?;
        acc.value += v;
        acc.quad_err += e;
        acc.degraded |= d;
        acc.s_end = b;
        acc.remainder = v.abs() * b / ((decay - 1.0) * (b - a));
        a = b;
        if b >= MIN_END && acc.remainder <= target {
            break;
        }
    }
    Ok(acc)
}

fn default_cap(p: f64) -> f64 {
    if p >= 1e3 {
        400.0 * PI
    } else {
        (40.0 * p).max(60.0 * PI).min(4000.0)
    }
}

/// Mean of |sin|^u over a period.
fn sin_power_mean(u: f64) -> f64 {
    (ln_gamma(0.5 * (u + 1.0)).unwrap() - ln_gamma(0.5 * u + 1.0).unwrap()).exp() / PI.sqrt()
}

/// int_S^inf (2 env(s))^u ds for even p, on a geometric panel set.
fn envelope_tail(p: &PExponent, s: f64, u: f64) -> Result<f64> {
    let f = |t: f64| (2.0 * boyd_envelope(p, t).unwrap_or(0.0)).powf(u);
    let breaks = [s, 1.25 * s, 1.5 * s, 2.0 * s, 3.0 * s, 5.0 * s, 10.0 * s];
    Ok(integrate_breaks(&f, &breaks, Tol::new(1e-300, 1e-8), 2000)?.value)
}

pub(crate) fn hp_raw(p: &PExponent, u: f64, spec: &QuadratureSpec) -> Result<HpEstimate> {
    if !(u > 1.0) || !u.is_finite() {
        return Err(domain(format!("h_p needs a finite u > 1, got {u}")));
    }
    let pv = p.value();
    let phi = move |y: f64| y.abs().powf(u);
    let scale = if u > LARGE_U { u.sqrt() } else { 1.0 };
    let acc = accumulate(p, spec, u, &phi, scale, default_cap(pv))?;
    let s = acc.s_end;

    let (tail_value, tail_bound, tail) = if acc.capped {
        let t = sin_power_mean(u) * s.powf(1.0 - u) / (u - 1.0) / p.gamma_norm().powf(u);
        (t, t, TailKind::SincModel)
    } else if p.is_even_integer() {
        let env = if pv >= 4.0 && pv < 1e3 { envelope_tail(p, s, u)? } else { 0.0 };
        (0.0, acc.remainder.max(env), TailKind::EvenEnvelope)
    } else if s >= tail_threshold(p)? {
        let c = tail_asymptote(p, 1.0)?.abs();
        let k = u * (pv + 1.0);
        let t = (u * c.ln() + (1.0 - k) * s.ln()).exp() / (k - 1.0);
        (t, 1.5f64.powf(u) * t, TailKind::PowerLaw)
    } else {
        (0.0, acc.remainder, TailKind::DecayModel)
    };
    let su = u.sqrt();
    Ok(HpEstimate {
        p: pv,
        u,
        value: su * (acc.value + tail_value),
        tail_bound: su * tail_bound,
        quad_err: su * acc.quad_err,
        s_end: s,
        tail,
        degraded: acc.degraded || acc.capped,
    })
}

/// h_p(u) = sqrt(u) int_0^inf |gamma_p(s)|^u ds for u >= 2.
pub fn h_p(p: &PExponent, u: f64, spec: &QuadratureSpec) -> Result<HpEstimate> {
    if !(u >= 2.0) {
        return Err(domain(format!("h_p is defined here for u >= 2, got {u}")));
    }
    hp_raw(p, u, spec)
}

/// h_p on a list of exponents, in parallel.
pub fn h_p_sweep(p: &PExponent, us: &[f64], spec: &QuadratureSpec) -> Result<Vec<HpEstimate>> {
    use rayon::prelude::*;
    us.par_iter().map(|&u| h_p(p, u, spec)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpDerivative {
    pub p: f64,
    /// (1/8) sqrt(pi/d_p) + sqrt(2) int gamma_p^2 ln|gamma_p|
    pub value: f64,
    pub log_integral: f64,
    /// Richardson-extrapolated central difference of h_p around u = 2.
    pub fd_value: f64,
    pub quad_err: f64,
    /// |value - fd_value| plus the quadrature and truncation errors.
    pub error_estimate: f64,
}

/// h_p'(2) from its closed form, with a finite-difference cross-check.
pub fn h_p_deriv_at_2(p: &PExponent, spec: &QuadratureSpec) -> Result<HpDerivative> {
    let pv = p.value();
    if !(pv > 2.0) {
        return Err(domain(format!("h_p'(2) needs p > 2, got {pv}")));
    }
    // y^2 ln|y| vanishes at the zeros of gamma_p, where the blocks are split.
    let phi = |y: f64| if y == 0.0 { 0.0 } else { y * y * y.abs().ln() };
    let acc = accumulate(p, spec, 1.8, &phi, 1.0, default_cap(pv))?;
    let value = 0.125 * (PI / d_p(pv)).sqrt() + 2f64.sqrt() * acc.value;

    let central = |h: f64| -> Result<f64> {
        Ok((hp_raw(p, 2.0 + h, spec)?.value - hp_raw(p, 2.0 - h, spec)?.value) / (2.0 * h))
    };
    let (d1, d2) = (central(0.02)?, central(0.01)?);
    let fd_value = (4.0 * d2 - d1) / 3.0;
    let quad_err = 2f64.sqrt() * (acc.quad_err + acc.remainder);
    Ok(HpDerivative {
        p: pv,
        value,
        log_integral: acc.value,
        fd_value,
        quad_err,
        error_estimate: (value - fd_value).abs() + quad_err,
    })
}

/// Estimates of F(x) in the intermediate range, each paired with the
/// exponent window where it is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PsiRegime {
    /// F >= (5/8) p - 27/16 from the one-sinc approximation.
    Coarse,
    /// F >= 1.5384 p - 2.13, p > 175.
    Refined175,
    /// F >= 1.5568 p - 2.40, 26 <= p <= 175.
    Refined26,
    /// F >= 1.6265 p - 2.478, 20 <= p <= 26.
    Refined20,
}

impl PsiRegime {
    fn coefficients(self) -> (f64, f64) {
        match self {
            PsiRegime::Coarse => (5.0 / 8.0, 27.0 / 16.0),
            PsiRegime::Refined175 => (1.5384, 2.13),
            PsiRegime::Refined26 => (1.5568, 2.40),
            PsiRegime::Refined20 => (1.6265, 2.478),
        }
    }

    /// The refined regime whose window contains p.
    pub fn refined_for(p: f64) -> PsiRegime {
        if p > 175.0 {
            PsiRegime::Refined175
        } else if p >= 26.0 {
            PsiRegime::Refined26
        } else {
            PsiRegime::Refined20
        }
    }
}

impl FromStr for PsiRegime {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coarse" => Ok(PsiRegime::Coarse),
            "refined_175" => Ok(PsiRegime::Refined175),
            "refined_26" => Ok(PsiRegime::Refined26),
            "refined_20" => Ok(PsiRegime::Refined20),
            other => Err(domain(format!(
                "unknown regime {other:?}; expected coarse, refined_175, refined_26 or refined_20"
            ))),
        }
    }
}

/// psi_A(p) = a p - b - 3.5528 sqrt((p + 1)(ln(A p) + 0.365)): lower bound on F
/// minus the bound on G at the smallest x of the intermediate range.
pub fn psi_a_margin(p: f64, a: f64, regime: PsiRegime) -> Result<f64> {
    if !(p >= 15.0) || !(a >= 1.0) || !p.is_finite() || !a.is_finite() {
        return Err(domain(format!("psi_A needs p >= 15 and A >= 1, got p = {p}, A = {a}")));
    }
    let (k, c) = regime.coefficients();
    Ok(k * p - c - 3.5528 * ((p + 1.0) * ((a * p).ln() + 0.365)).sqrt())
}

/// Lower bound on the slope ratio |F'|/|G'| at a landmark level x, from
/// derivative bounds at the guaranteed minimal crossing positions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandmarkMargin {
    pub x: f64,
    pub claimed: f64,
    /// With the derivative bounds rounded to 1.102 and 1.053.
    pub rounded: f64,
    /// With 1.064 / Gamma(16/15) and 1.016 / Gamma(16/15).
    pub unrounded: f64,
}

pub fn landmark_ratio_margins() -> Vec<LandmarkMargin> {
    let g = gamma(1.0 + 1.0 / 15.0).unwrap();
    // (x, claimed margin, first-arch crossing, crossings beyond pi)
    let cases: [(f64, f64, f64, &[f64]); 3] = [
        (1.0 / 8.0, 1.06, 2.48, &[3.55, 3.55]),
        (1.0 / 10.0, 1.03, 2.75, &[3.45, 5.39]),
        (1.0 / 20.0, 1.1, 2.966, &[3.27, 5.57, 5.57, 5.57]),
    ];
    let margin = |k1: f64, k2: f64, x: f64, s1: f64, rest: &[f64]| {
        let l = |k: f64, s: f64| k * (1.0 / s + 1.0 / 15.0);
        let sum = 1.0 / l(k1, s1) + rest.iter().map(|&s| 1.0 / l(k2, s)).sum::<f64>();
        0.796 * sum * x * (1.0 / x).ln().sqrt()
    };
    cases
        .iter()
        .map(|&(x, claimed, s1, rest)| LandmarkMargin {
            x,
            claimed,
            rounded: margin(1.102, 1.053, x, s1, rest),
            unrounded: margin(1.064 / g, 1.016 / g, x, s1, rest),
        })
        .collect()
}

/// Maximum of |sin s / s| on [k pi, (k+1) pi]: (argmax, value).
pub fn sinc_bump_max(k: u32) -> Result<(f64, f64)> {
    if k == 0 {
        return Ok((0.0, 1.0));
    }
    let a = k as f64 * PI;
    golden_max(|s| Ok((s.sin() / s).abs()), a, a + PI, 1e-12)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn gaussian_case_is_exact() {
        // gamma_2(s) = exp(-s^2/4): h_2(u) = sqrt(pi)
        let p = PExponent::new(2.0).unwrap();
        for u in [2.0, 3.0, 7.5, 250.0] {
            let h = h_p(&p, u, &spec()).unwrap();
            assert!((h.value - PI.sqrt()).abs() < 1e-10, "u = {u}: {}", h.value);
        }
    }

    #[test]
    fn sin_power_mean_values() {
        assert!((sin_power_mean(2.0) - 0.5).abs() < 1e-14);
        assert!((sin_power_mean(4.0) - 0.375).abs() < 1e-14);
        assert!((sin_power_mean(1.0) - 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn rejects_small_u() {
        let p = PExponent::new(5.0).unwrap();
        assert!(h_p(&p, 1.9, &spec()).is_err());
        assert!(h_p_deriv_at_2(&PExponent::new(2.0).unwrap(), &spec()).is_err());
    }

    #[test]
    fn psi_regime_parsing() {
        assert_eq!("refined_26".parse::<PsiRegime>().unwrap(), PsiRegime::Refined26);
        assert!("fine".parse::<PsiRegime>().is_err());
        assert!(psi_a_margin(10.0, 2.0, PsiRegime::Coarse).is_err());
        assert!(psi_a_margin(30.0, 0.5, PsiRegime::Coarse).is_err());
    }

    #[test]
    fn sinc_bumps() {
        let (s1, y1) = sinc_bump_max(1).unwrap();
        // the maxima solve tan s = s; golden search resolves the argmax to ~sqrt(eps)
        assert!((s1 - 4.493409457909064).abs() < 1e-6);
        assert!((y1 - 0.217233628211222).abs() < 1e-12);
        assert!(y1 > sinc_bump_max(2).unwrap().1);
    }
}

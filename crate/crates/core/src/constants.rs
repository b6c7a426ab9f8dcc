//! Closed-form constants of the Gaussian comparison and the critical exponents.
//!
//! c_p comes from the second moment of gamma_p at 0, d_p from the Plancherel
//! normalisation. They cross at p0.

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::gamma_p::PExponent;
use crate::quad::brent_root;
use crate::special_fn::{digamma, gamma};

/// Bracket width at which the critical-exponent solvers stop.
pub const ROOT_XTOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalConstants {
    pub p: f64,
    pub c_p: f64,
    pub d_p: f64,
    /// d_p / c_p
    pub ratio_r: f64,
    /// h_p(2) = sqrt(pi / d_p) / 2
    pub h2: f64,
    /// h_p(inf) = sqrt(pi / c_p) / 2
    pub h_inf: f64,
    /// lim_n A_{n,p}(a^(n))
    pub diag_limit: f64,
    /// sqrt(pi/6 * Gamma(1+3/p) / Gamma(1+1/p)^3); sections with a_1 above it satisfy A <= diag_limit.
    pub a1_threshold: f64,
}

pub fn c_p(p: f64) -> f64 {
    gamma(1.0 + 3.0 / p).unwrap() / (6.0 * gamma(1.0 + 1.0 / p).unwrap())
}

pub fn d_p(p: f64) -> f64 {
    let g = 2f64.powf(1.0 / p) * gamma(1.0 + 1.0 / p).unwrap();
    g * g / (2.0 * PI)
}

pub fn constants_at(p: &PExponent) -> Result<CriticalConstants> {
    p.require_at_least(2.0, "constants_at")?;
    let pv = p.value();
    let (c, d) = (c_p(pv), d_p(pv));
    let g1 = gamma(1.0 + 1.0 / pv)?;
    let g3 = gamma(1.0 + 3.0 / pv)?;
    let diag_limit = (6.0 / PI * g1 * g1 * g1 / g3).sqrt();
    Ok(CriticalConstants {
        p: pv,
        c_p: c,
        d_p: d,
        ratio_r: d / c,
        h2: 0.5 * (PI / d).sqrt(),
        h_inf: 0.5 * (PI / c).sqrt(),
        diag_limit,
        a1_threshold: 1.0 / diag_limit,
    })
}

/// phi(p) = (3/pi) 2^(2/p) Gamma(1+1/p)^3 / Gamma(1+3/p) = d_p / c_p.
pub fn phi_crossing(p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(domain(format!("phi_crossing needs p > 0, got {p}")));
    }
    let g1 = gamma(1.0 + 1.0 / p)?;
    Ok(3.0 / PI * 2f64.powf(2.0 / p) * g1 * g1 * g1 / gamma(1.0 + 3.0 / p)?)
}

fn bracketed(name: &str, f: impl FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<f64> {
    brent_root(f, a, b, ROOT_XTOL, 200)
        .map_err(|e| Error::Solver(format!("{name}: {e}")))
}

/// Root of phi(p) = 1 in [26, 27].
pub fn solve_p0() -> Result<f64> {
    bracketed("p0", |p| Ok(phi_crossing(p)? - 1.0), 26.0, 27.0)
}

/// Root of 2 ln 2 + 3 (Psi(1+1/p) - Psi(1+3/p)) = 0 in [2, 5].
pub fn solve_p1() -> Result<f64> {
    bracketed(
        "p1",
        |p| Ok(2.0 * LN_2 + 3.0 * (digamma(1.0 + 1.0 / p)? - digamma(1.0 + 3.0 / p)?)),
        2.0,
        5.0,
    )
}

/// Root of Psi(1+1/p) - 3 Psi(1+3/p) = 0 in [9, 10]; c_p is minimal there.
pub fn solve_p2() -> Result<f64> {
    bracketed("p2", |p| Ok(digamma(1.0 + 1.0 / p)? - 3.0 * digamma(1.0 + 3.0 / p)?), 9.0, 10.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SectionClosedForms {
    /// A_{n,p}(a^(2)) = 2^(1/2 - 1/p)
    pub a2_value: f64,
    pub diag_limit: f64,
}

pub fn section_closed_forms(p: &PExponent) -> Result<SectionClosedForms> {
    let pv = p.value();
    let g1 = gamma(1.0 + 1.0 / pv)?;
    Ok(SectionClosedForms {
        a2_value: 2f64.powf(0.5 - 1.0 / pv),
        diag_limit: (6.0 / PI * g1 * g1 * g1 / gamma(1.0 + 3.0 / pv)?).sqrt(),
    })
}

/// The window of a_1 not reached by either argument for the a^(2) bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IpGap {
    pub lo: f64,
    pub hi: f64,
    pub length: f64,
    /// 1 / (2p)
    pub length_bound: f64,
}

pub fn ip_gap(p: &PExponent) -> IpGap {
    let pv = p.value();
    let lo = std::f64::consts::FRAC_1_SQRT_2;
    let hi = 2f64.powf(1.0 / pv) * lo;
    IpGap { lo, hi, length: hi - lo, length_bound: 0.5 / pv }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(p: f64) -> CriticalConstants {
        constants_at(&PExponent::new(p).unwrap()).unwrap()
    }

    #[test]
    fn euclidean_case() {
        let k = at(2.0);
        assert!((k.c_p - 0.25).abs() < 1e-14 && (k.d_p - 0.25).abs() < 1e-14);
        assert!((k.diag_limit - 1.0).abs() < 1e-14);
        assert!((k.h2 - k.h_inf).abs() < 1e-13);
    }

    #[test]
    fn diag_limit_consistency() {
        for p in [2.5, 7.0, 30.0, 400.0] {
            let k = at(p);
            let via_h = gamma(1.0 + 1.0 / p).unwrap() * 2.0 / PI * k.h_inf;
            assert!((k.diag_limit - via_h).abs() < 1e-14, "p = {p}");
        }
    }

    #[test]
    fn crossing_brackets() {
        assert!(phi_crossing(26.0).unwrap() > 1.0);
        assert!(phi_crossing(27.0).unwrap() < 1.0);
    }

    #[test]
    fn p1_p2_residuals_vanish() {
        let p1 = solve_p1().unwrap();
        let r = 2.0 * LN_2 + 3.0 * (digamma(1.0 + 1.0 / p1).unwrap() - digamma(1.0 + 3.0 / p1).unwrap());
        assert!(r.abs() < 1e-9);
        let p2 = solve_p2().unwrap();
        let eps = 1e-3;
        assert!(c_p(p2) < c_p(p2 - eps) && c_p(p2) < c_p(p2 + eps));
    }

    #[test]
    fn gap_length_below_bound() {
        for p in [20.0, 26.265, 100.0] {
            let g = ip_gap(&PExponent::new(p).unwrap());
            assert!(g.length > 0.0 && g.length < g.length_bound, "p = {p}");
        }
    }
}

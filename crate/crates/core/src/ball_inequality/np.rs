//! The Nazarov-Podkorytov comparison of |gamma_p| with a Gaussian.
//!
//! If G - F changes sign once, from - to +, then
//! H(u) = (1/(u x0^u)) int (g^u - f^u) ds is nondecreasing in u. With equal
//! L2 norms H(2) = 0, so H(u) >= 0 and int f^u <= int g^u for u >= 2.

use serde::{Deserialize, Serialize};

use super::distribution::{distribution_f_with, distribution_g, DistributionCurve, GammaLevelSets};
use super::{h_p_sweep, psi_a_margin, HpEstimate, PsiRegime};
use crate::constants::{constants_at, solve_p0};
use crate::error::{domain, Error, Result};
use crate::gamma_p::{gamma_p, gamma_p_deriv, PExponent, QuadratureSpec};
use crate::quad::brent_root;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// The lower and upper values straddle the decision.
    Indeterminate,
}

impl Verdict {
    fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fails, _) | (_, Fails) => Fails,
            (Indeterminate, _) | (_, Indeterminate) => Indeterminate,
            _ => Holds,
        }
    }

    fn all(it: impl IntoIterator<Item = Verdict>) -> Verdict {
        it.into_iter().fold(Verdict::Holds, Verdict::combine)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub x0: f64,
    pub u_grid: Vec<f64>,
    /// Lower and upper values of H(u) = x0^-u int_0^1 x^(u-1) (G - F) dx.
    pub h_lo: Vec<f64>,
    pub h_hi: Vec<f64>,
    pub verdict: Verdict,
}

/// Bounds on int_0^1 x^(u-1) (G(x) - F(x)) dx from the sampled curves.
fn layer_difference(f: &DistributionCurve, g: &DistributionCurve, u: f64) -> (f64, f64) {
    if u == 2.0 {
        // layer cake: int_0^1 2x F(x) dx = int f^2
        return (0.5 * (g.norm_sq.0 - f.norm_sq.1), 0.5 * (g.norm_sq.1 - f.norm_sq.0));
    }
    let xs = &f.grid;
    let n = xs.len();
    let (mut lo, mut hi) = (0.0, 0.0);
    for i in 0..n {
        let (xa, xb) = (xs[i], if i + 1 < n { xs[i + 1] } else { 1.0 });
        let w = (xb.powf(u) - xa.powf(u)) / u;
        // on [xa, xb] each curve lies between its values at the two ends
        let (f_lo, g_lo) = if i + 1 < n { (f.value_lo[i + 1], g.value_lo[i + 1]) } else { (0.0, 0.0) };
        lo += (g_lo - f.value_hi[i]) * w;
        hi += (g.value_hi[i] - f_lo) * w;
    }
    // below the grid: int_0^xg x^(u-1) F <= xg^(u-2) int_0^xg x F <= xg^(u-2) |f|^2 / 2
    let below = xs[0].powf(u - 2.0) * 0.5;
    (lo - below * f.norm_sq.1, hi + below * g.norm_sq.1)
}

/// Checks on a u-grid that H(u) = (1/(u x0^u)) int (g^u - f^u) is nondecreasing.
pub fn np_monotone_check(
    f: &DistributionCurve,
    g: &DistributionCurve,
    x0: f64,
    u_grid: &[f64],
) -> Result<MonotoneReport> {
    f.validate()?;
    g.validate()?;
    if f.grid != g.grid {
        return Err(Error::Validation("F and G must be sampled on the same grid".into()));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(domain(format!("x0 must lie in (0, 1), got {x0}")));
    }
    if u_grid.is_empty() || u_grid.iter().any(|&u| !(u >= 2.0)) || u_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(domain("u_grid must be increasing with all u >= 2"));
    }
    let (mut h_lo, mut h_hi) = (Vec::new(), Vec::new());
    for &u in u_grid {
        let (lo, hi) = layer_difference(f, g, u);
        let scale = x0.powf(-u);
        h_lo.push(lo * scale);
        h_hi.push(hi * scale);
    }
    let verdict = Verdict::all((1..u_grid.len()).map(|i| {
        if h_lo[i] >= h_hi[i - 1] {
            Verdict::Holds
        } else if h_hi[i] < h_lo[i - 1] {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }));
    Ok(MonotoneReport { x0, u_grid: u_grid.to_vec(), h_lo, h_hi, verdict })
}

/// The Gaussian that |gamma_p| is compared with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparator {
    /// exp(-d_p s^2), p >= p0: bound h_p(u) <= h_p(2).
    DP,
    /// exp(-c_p s^2), p < p0: bound h_p(u) <= h_p(inf).
    CP,
}

/// How levels below x_min = 1/(210 p) are covered. They are not computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BelowGridCoverage {
    /// No power-law tail, so the analytic argument does not apply.
    EvenInteger,
    /// A = dist(p, 2N)^(-1/p); covered when the margin is positive.
    PsiMargin { regime: PsiRegime, a: f64, margin: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NpReport {
    pub p: f64,
    pub comparator: Comparator,
    pub kappa: f64,
    /// max |gamma_p| over s >= 3
    pub x1: f64,
    pub x_min: f64,
    pub s_max: f64,
    /// gamma_p < exp(-kappa s^2) on (0, 3] and |gamma_p| below it on [3, 3.3].
    pub majorant_ok: bool,
    /// F < G on [x1, 1).
    pub upper_range: Verdict,
    /// min over [1/20, x1) of |F'|/|G'|.
    pub ratio_min: f64,
    pub ratio_argmin: f64,
    pub ratio_landmarks: Vec<(f64, f64)>,
    /// F > G on [x_min, 1/20].
    pub lower_range: Verdict,
    pub crossing_x0: Option<f64>,
    pub sign_pattern_ok: bool,
    pub indeterminate_windows: Vec<(f64, f64)>,
    pub hp_bound: f64,
    pub hp_curve: Vec<(f64, f64)>,
    pub hp_estimates: Vec<HpEstimate>,
    pub hp_ok: bool,
    pub below_grid: BelowGridCoverage,
    pub conclusion_ok: bool,
}

pub const NP_U_GRID: [f64; 6] = [2.0, 3.0, 4.0, 8.0, 16.0, 64.0];
pub const NP_GRID_POINTS: usize = 400;
/// Allowed excess of h_p(u) over its bound, for quadrature noise.
pub const HP_SLACK: f64 = 1e-6;
const X_SPLIT: f64 = 1.0 / 20.0;

/// max over the grid of gamma_p(s) - exp(-kappa s^2), or of |gamma_p(s)| - ... when `absolute`.
pub fn majorant_excess(
    p: &PExponent,
    kappa: f64,
    s_grid: &[f64],
    absolute: bool,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for &s in s_grid {
        let g = gamma_p(p, s, spec)?;
        let g = if absolute { g.abs() } else { g };
        worst = worst.max(g - (-kappa * s * s).exp());
    }
    Ok(worst)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let r = (hi / lo).ln();
    (0..n).map(|k| lo * (r * k as f64 / n as f64).exp()).collect()
}

/// 2 sqrt(kappa) x sqrt(ln(1/x)) sum 1/|gamma_p'(s)| over |gamma_p(s)| = x.
fn slope_ratio(sets: &GammaLevelSets, p: &PExponent, kappa: f64, x: f64, spec: &QuadratureSpec) -> Result<f64> {
    let mut sum = 0.0;
    for s in sets.crossings(x)? {
        sum += 1.0 / gamma_p_deriv(p, s, 1, spec)?.abs();
    }
    Ok(2.0 * kappa.sqrt() * x * (1.0 / x).ln().sqrt() * sum)
}

#[derive(Clone, Copy, PartialEq)]
enum Sign {
    Plus,
    Minus,
    Unknown,
}

/// Runs the whole comparison for p >= 20 at desk scale.
pub fn np_full_check(p: &PExponent, spec: &QuadratureSpec) -> Result<NpReport> {
    let pv = p.value();
    if !(pv >= 20.0) {
        return Err(domain(format!("np_full_check covers p >= 20, got {pv}")));
    }
    let consts = constants_at(p)?;
    let (comparator, kappa, hp_bound) = if pv >= solve_p0()? {
        (Comparator::DP, consts.d_p, consts.h2)
    } else {
        (Comparator::CP, consts.c_p, consts.h_inf)
    };
    let x_min = 1.0 / (210.0 * pv);
    let sets = GammaLevelSets::new(p, x_min, spec)?;
    let x1 = sets.profile().x1;

    let mut xs = log_grid(x_min, 1.0, NP_GRID_POINTS);
    xs.extend([1.0 / 20.0, 1.0 / 10.0, 1.0 / 8.0, x1]);
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let f = distribution_f_with(&sets, &xs)?;
    let g: Vec<f64> = f.grid.iter().map(|&x| distribution_g(x, kappa)).collect::<Result<_>>()?;

    // (a) Gaussian majorant near the origin, then F < G above x1
    let s_grid: Vec<f64> = (1..=300).map(|k| 0.01 * k as f64).collect();
    let window: Vec<f64> = (300..=330).map(|k| 0.01 * k as f64).collect();
    let majorant_ok = majorant_excess(p, kappa, &s_grid, false, spec)? < 0.0
        && majorant_excess(p, kappa, &window, true, spec)? < 0.0;
    let upper_range = Verdict::all(f.grid.iter().enumerate().filter(|(_, &x)| x >= x1).map(|(i, _)| {
        if f.value_hi[i] < g[i] {
            Verdict::Holds
        } else if f.value_lo[i] >= g[i] {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }));

    // (b) slope ratio between 1/20 and x1
    let mut ratio_min = f64::INFINITY;
    let mut ratio_argmin = f64::NAN;
    for &x in f.grid.iter().filter(|&&x| x >= X_SPLIT && x < x1) {
        let r = slope_ratio(&sets, p, kappa, x, spec)?;
        if r < ratio_min {
            ratio_min = r;
            ratio_argmin = x;
        }
    }
    let ratio_landmarks = [1.0 / 8.0, 1.0 / 10.0, 1.0 / 20.0]
        .iter()
        .filter(|&&x| x < x1)
        .map(|&x| Ok((x, slope_ratio(&sets, p, kappa, x, spec)?)))
        .collect::<Result<Vec<_>>>()?;

    // (c) F > G from x_min to 1/20
    let lower_range = Verdict::all(f.grid.iter().enumerate().filter(|(_, &x)| x <= X_SPLIT).map(|(i, _)| {
        if f.value_lo[i] > g[i] {
            Verdict::Holds
        } else if f.value_hi[i] <= g[i] {
            Verdict::Fails
        } else {
            Verdict::Indeterminate
        }
    }));

    // (d) sign pattern of F - G and the crossing
    let signs: Vec<Sign> = (0..f.len())
        .map(|i| {
            if f.value_lo[i] > g[i] {
                Sign::Plus
            } else if f.value_hi[i] < g[i] {
                Sign::Minus
            } else {
                Sign::Unknown
            }
        })
        .collect();
    let mut indeterminate_windows = Vec::new();
    let mut i = 0;
    while i < signs.len() {
        if signs[i] == Sign::Unknown {
            let start = i;
            while i + 1 < signs.len() && signs[i + 1] == Sign::Unknown {
                i += 1;
            }
            indeterminate_windows.push((f.grid[start], f.grid[i]));
        }
        i += 1;
    }
    let last_plus = signs.iter().rposition(|&s| s == Sign::Plus);
    let first_minus = signs.iter().position(|&s| s == Sign::Minus);
    let sign_pattern_ok = match (last_plus, first_minus) {
        (Some(a), Some(b)) => {
            a < b
                && signs[..a].iter().all(|&s| s == Sign::Plus)
                && signs[b..].iter().all(|&s| s == Sign::Minus)
        }
        _ => false,
    };
    let crossing_x0 = match (last_plus, first_minus) {
        (Some(a), Some(b)) if a < b => {
            let d = |x: f64| -> Result<f64> {
                let (lo, hi) = sets.measure(x)?;
                Ok(0.5 * (lo + hi) - distribution_g(x, kappa)?)
            };
            Some(brent_root(d, f.grid[a], f.grid[b], 1e-12, 200)?)
        }
        _ => None,
    };

    let hp_estimates = h_p_sweep(p, &NP_U_GRID, spec)?;
    let hp_curve: Vec<(f64, f64)> = hp_estimates.iter().map(|h| (h.u, h.value)).collect();
    let hp_ok = hp_curve.iter().all(|&(_, v)| v <= hp_bound + HP_SLACK);

    let below_grid = if p.is_even_integer() {
        BelowGridCoverage::EvenInteger
    } else {
        let a = p.dist_even().powf(-1.0 / pv).max(1.0);
        let regime = PsiRegime::refined_for(pv);
        BelowGridCoverage::PsiMargin { regime, a, margin: psi_a_margin(pv, a, regime)? }
    };

    let x0_ok = crossing_x0.map_or(false, |x0| x0 > X_SPLIT && x0 < x1);
    let conclusion_ok = majorant_ok
        && upper_range == Verdict::Holds
        && ratio_min > 1.0
        && lower_range == Verdict::Holds
        && sign_pattern_ok
        && x0_ok
        && hp_ok;

    Ok(NpReport {
        p: pv,
        comparator,
        kappa,
        x1,
        x_min,
        s_max: sets.s_max(),
        majorant_ok,
        upper_range,
        ratio_min,
        ratio_argmin,
        ratio_landmarks,
        lower_range,
        crossing_x0,
        sign_pattern_ok,
        indeterminate_windows,
        hp_bound,
        hp_curve,
        hp_estimates,
        hp_ok,
        below_grid,
        conclusion_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball_inequality::distribution_g_curve;

    #[test]
    fn identical_curves_give_zero() {
        let xs = log_grid(1e-3, 1.0, 50);
        let g = distribution_g_curve(&xs, 0.2).unwrap();
        let r = np_monotone_check(&g, &g, 0.3, &[2.0, 3.0, 5.0]).unwrap();
        assert_eq!(r.h_lo[0], 0.0);
        assert_eq!(r.h_hi[0], 0.0);
        assert!(r.verdict != Verdict::Fails);
    }

    #[test]
    fn verdict_combination() {
        use Verdict::*;
        assert_eq!(Verdict::all([Holds, Indeterminate, Holds]), Indeterminate);
        assert_eq!(Verdict::all([Holds, Indeterminate, Fails]), Fails);
        assert_eq!(Verdict::all([Holds, Holds]), Holds);
    }

    #[test]
    fn rejects_small_p() {
        assert!(np_full_check(&PExponent::new(15.0).unwrap(), &QuadratureSpec::default()).is_err());
    }
}

//! The normalized section function
//! A_{n,p}(a) = vol(B_p^n cap a^perp) / vol(B_p^(n-1))
//! by three independent routes: the Fourier product integral, Monte Carlo
//! over random radii and directions, and plane geometry for n <= 3.

use std::cell::RefCell;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ball_inequality::{h_p, zeros_in};
use crate::constants::section_closed_forms;
use crate::error::{domain, Error, Result};
use crate::gamma_p::{gamma_p, PExponent, QuadratureSpec};
use crate::quad::{gk21, integrate_breaks, Tol};
use crate::special_fn::gamma;

/// Tolerance on the unit norm of a direction.
pub const UNIT_TOL: f64 = 1e-12;
pub const MIN_MC_SAMPLES: u64 = 10_000;
/// Samples per independent random substream.
pub const MC_CHUNK: u64 = 1 << 14;
const BRUTE_TOL: f64 = 1e-11;
const SIMPSON_DEPTH: u32 = 16;

/// A unit vector with nonnegative, nonincreasing coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::Validation(format!("a direction needs n >= 2, got {}", coords.len())));
        }
        if coords.iter().any(|c| !(c.is_finite() && *c >= 0.0)) {
            return Err(Error::Validation("coordinates must be finite and nonnegative".into()));
        }
        if coords.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Validation("coordinates must be nonincreasing".into()));
        }
        let norm_sq: f64 = coords.iter().map(|c| c * c).sum();
        if (norm_sq - 1.0).abs() > UNIT_TOL {
            return Err(Error::Validation(format!("sum of squares is {norm_sq}, not 1")));
        }
        Ok(Direction { coords })
    }

    /// Takes absolute values, sorts and rescales. The symmetries of B_p^n
    /// make this the same section up to congruence.
    pub fn normalized(v: &[f64]) -> Result<Self> {
        let mut c: Vec<f64> = v.iter().map(|x| x.abs()).collect();
        let norm = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Validation("cannot normalize a zero or non-finite vector".into()));
        }
        c.iter_mut().for_each(|x| *x /= norm);
        c.sort_by(|a, b| b.total_cmp(a));
        Direction::new(c)
    }

    /// a^(k) in R^n: k equal coordinates 1/sqrt(k), then zeros.
    pub fn candidate(k: usize, n: usize) -> Result<Self> {
        if n < 2 || k == 0 || k > n {
            return Err(Error::Validation(format!("a^({k}) needs 1 <= k <= n and n >= 2, got n = {n}")));
        }
        let v = 1.0 / (k as f64).sqrt();
        Direction::new((0..n).map(|j| if j < k { v } else { 0.0 }).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn n(&self) -> usize {
        self.coords.len()
    }

    pub fn a1(&self) -> f64 {
        self.coords[0]
    }

    /// Nonzero coordinates grouped as (value, multiplicity).
    fn groups(&self) -> Vec<(f64, usize)> {
        let mut out: Vec<(f64, usize)> = Vec::new();
        for &c in self.coords.iter().filter(|&&c| c > 0.0) {
            match out.last_mut() {
                Some((v, m)) if *v == c => *m += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }
}

impl TryFrom<Vec<f64>> for Direction {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vec<f64> {
    fn from(d: Direction) -> Self {
        d.coords
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Polya,
    Mc,
    Brute,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SectionMeta {
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Where the Fourier integral was cut off.
    pub truncation: Option<f64>,
    /// The error target was not met; `err` is what was achieved.
    pub degraded: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionEstimate {
    pub value: f64,
    pub method: Method,
    /// Absolute error bound, or the standard error for Monte Carlo.
    pub err: f64,
    pub meta: SectionMeta,
}

const BLOCK_PERIODS: f64 = 4.0;
const MIN_PERIODS: f64 = 8.0;

fn polya_cap(p: f64) -> f64 {
    if p >= 1e3 {
        400.0 * PI
    } else {
        (40.0 * p).max(60.0 * PI).min(4000.0)
    }
}

/// int_a^b prod gamma_p(c s)^m ds, split at the zeros of every factor.
fn product_block(
    p: &PExponent,
    spec: &QuadratureSpec,
    groups: &[(f64, usize)],
    a: f64,
    b: f64,
    tol_abs: f64,
) -> Result<(f64, f64, f64, bool)> {
    let mut breaks = vec![a, b];
    for &(c, _) in groups {
        breaks.extend(zeros_in(p, spec, c * a, c * b)?.into_iter().map(|z| z / c));
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let f = |s: f64| {
        let mut prod = 1.0;
        for &(c, m) in groups {
            match gamma_p(p, c * s, spec) {
                Ok(v) => prod *= v.powi(m as i32),
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    return 0.0;
                }
            }
        }
        prod
    };
    let out = integrate_breaks(&f, &breaks, Tol::new(tol_abs, spec.rel_tol), 20_000);
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    match out {
        Ok(o) => Ok((o.value, o.abs_err, o.abs_mass, false)),
        Err(Error::Quadrature { value, achieved }) => Ok((value, achieved, value.abs(), true)),
        Err(e) => Err(e),
    }
}

/// A_{n,p}(a) = Gamma(1+1/p) (2/pi) int_0^inf prod_j gamma_p(a_j s) ds.
///
/// Integrated in blocks of four periods of the fastest factor. The cutoff
/// remainder is modelled from the last block's mass as an s^-2 tail.
pub fn section_polya(p: &PExponent, a: &Direction, spec: &QuadratureSpec) -> Result<SectionEstimate> {
    spec.validate()?;
    let groups = a.groups();
    let meta = SectionMeta::default();
    if groups.len() == 1 && groups[0].1 == 1 {
        // a = e_1: the coordinate hyperplane, A = 1 by definition
        return Ok(SectionEstimate { value: 1.0, method: Method::Polya, err: 0.0, meta });
    }
    let period = PI / a.a1();
    let block = BLOCK_PERIODS * period;
    let cap = polya_cap(p.value()) / a.a1();
    let (v0, e0, _, d0) = product_block(p, spec, &groups, 0.0, block, spec.abs_tol)?;
    let target = spec.abs_tol.max(spec.rel_tol * v0.abs());
    let (mut value, mut quad_err, mut degraded) = (v0, e0, d0);
    let mut s = block;
    let mut remainder = f64::INFINITY;
    while s < cap {
        let b = (s + block).min(cap);
        let (v, e, mass, d) = product_block(p, spec, &groups, s, b, 0.02 * target)?;
        value += v;
        quad_err += e;
        degraded |= d;
        remainder = mass * b / (b - s);
        s = b;
        if s >= MIN_PERIODS * period && remainder <= target {
            break;
        }
    }
    let capped = remainder > target;
    let scale = p.gamma_norm() * 2.0 / PI;
    Ok(SectionEstimate {
        value: scale * value,
        method: Method::Polya,
        err: scale * (quad_err + remainder),
        meta: SectionMeta { truncation: Some(s), degraded: degraded || capped, ..meta },
    })
}

/// R with density p x^p exp(-x^p) / Gamma(1+1/p), as T^(1/p) for T ~ Gamma(1+1/p, 1).
pub struct RadialSampler {
    inv_p: f64,
    shape: Gamma<f64>,
}

impl RadialSampler {
    pub fn new(p: &PExponent) -> Result<Self> {
        let inv_p = 1.0 / p.value();
        let shape = Gamma::new(1.0 + inv_p, 1.0).map_err(|e| domain(format!("radial sampler: {e}")))?;
        Ok(RadialSampler { inv_p, shape })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.shape.sample(rng).powf(self.inv_p)
    }
}

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn chunk_sizes(samples: u64) -> Vec<(u64, u64)> {
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks).map(|i| (i, MC_CHUNK.min(samples - i * MC_CHUNK))).collect()
}

/// A = Gamma(1+1/p) E |sum_j a_j R_j xi_j|^-1 with xi_j uniform on S^2.
///
/// Each chunk of samples draws from its own ChaCha8 stream and partial sums
/// are combined in chunk order, so the result does not depend on the thread count.
pub fn section_mc(p: &PExponent, a: &Direction, samples: u64, seed: u64) -> Result<SectionEstimate> {
    if samples < MIN_MC_SAMPLES {
        return Err(domain(format!("section_mc needs at least {MIN_MC_SAMPLES} samples, got {samples}")));
    }
    let radial = RadialSampler::new(p)?;
    let coords: Vec<f64> = a.coords().iter().copied().filter(|&c| c > 0.0).collect();
    let partials: Vec<(f64, f64)> = chunk_sizes(samples)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = chunk_rng(seed, chunk);
            let (mut sum, mut sum_sq) = (0.0, 0.0);
            for _ in 0..len {
                let mut y = [0.0f64; 3];
                for &c in &coords {
                    let r = radial.sample(&mut rng);
                    let xi: [f64; 3] = [
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                        StandardNormal.sample(&mut rng),
                    ];
                    let k = c * r / (xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2]).sqrt();
                    for (yi, xv) in y.iter_mut().zip(xi) {
                        *yi += k * xv;
                    }
                }
                let z = 1.0 / (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
                sum += z;
                sum_sq += z * z;
            }
            (sum, sum_sq)
        })
        .collect();
    let (sum, sum_sq) = pairwise_sum(&partials);
    let nf = samples as f64;
    let mean = sum / nf;
    let var = (sum_sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    let g = p.gamma_norm();
    Ok(SectionEstimate {
        value: g * mean,
        method: Method::Mc,
        err: g * (var / nf).sqrt(),
        meta: SectionMeta { samples: Some(samples), seed: Some(seed), ..SectionMeta::default() },
    })
}

fn pairwise_sum(v: &[(f64, f64)]) -> (f64, f64) {
    match v.len() {
        0 => (0.0, 0.0),
        1 => v[0],
        n => {
            let (l, r) = (pairwise_sum(&v[..n / 2]), pairwise_sum(&v[n / 2..]));
            (l.0 + r.0, l.1 + r.1)
        }
    }
}

/// Draws `samples` radii with the Monte Carlo sampler's streams.
pub fn radial_samples(p: &PExponent, samples: u64, seed: u64) -> Result<Vec<f64>> {
    let radial = RadialSampler::new(p)?;
    let parts: Vec<Vec<f64>> = chunk_sizes(samples)
        .into_par_iter()
        .map(|(chunk, len)| {
            let mut rng = chunk_rng(seed, chunk);
            (0..len).map(|_| radial.sample(&mut rng)).collect()
        })
        .collect();
    Ok(parts.concat())
}

/// Kolmogorov-Smirnov distance between radial samples and the CDF obtained by
/// integrating the density between consecutive sorted samples.
pub fn radial_ks_distance(p: &PExponent, samples: u64, seed: u64) -> Result<f64> {
    let mut xs = radial_samples(p, samples, seed)?;
    xs.sort_by(f64::total_cmp);
    let pv = p.value();
    let norm = p.gamma_norm();
    let density = |x: f64| if x <= 0.0 { 0.0 } else { pv * x.powf(pv) * (-x.powf(pv)).exp() / norm };
    let n = xs.len() as f64;
    let (mut cdf, mut prev, mut d) = (0.0, 0.0, 0.0f64);
    for (i, &x) in xs.iter().enumerate() {
        // one GK21 panel is exact to far below 1/n on the tiny gaps;
        // wide gaps only occur in the tails
        let (v, _, _) = if x - prev > 0.05 {
            let o = integrate_breaks(&density, &[prev, x], Tol::new(1e-13, 1e-12), 1000)?;
            (o.value, o.abs_err, o.abs_mass)
        } else {
            gk21(&density, prev, x)
        };
        cdf += v;
        prev = x;
        d = d.max((i as f64 + 1.0) / n - cdf).max(cdf - i as f64 / n);
    }
    Ok(d)
}

fn p_norm(x: &[f64], p: f64) -> f64 {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if m == 0.0 {
        return 0.0;
    }
    m * x.iter().map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> (f64, bool) {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return (left + right + delta / 15.0, depth > 0);
    }
    let (l, okl) = simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    let (r, okr) = simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
    (l + r, okl && okr)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> (f64, bool) {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson(f, a, b, fa, fm, fb, whole, tol, SIMPSON_DEPTH)
}

fn cross(u: [f64; 3], v: [f64; 3]) -> [f64; 3] {
    [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]
}

/// Direct plane geometry for n = 2 and n = 3.
pub fn section_brute(p: &PExponent, a: &Direction) -> Result<SectionEstimate> {
    let pv = p.value();
    let c = a.coords();
    let meta = SectionMeta::default();
    match a.n() {
        2 => {
            // a^perp is spanned by (-a2, a1); the section is a segment of half-length 1/|b|_p
            let value = 1.0 / p_norm(&[c[1], c[0]], pv);
            Ok(SectionEstimate { value, method: Method::Brute, err: 4.0 * f64::EPSILON * value, meta })
        }
        3 => {
            let av = [c[0], c[1], c[2]];
            // the basis vector least aligned with a gives a well-conditioned cross product
            let k = (0..3).min_by(|&i, &j| av[i].total_cmp(&av[j])).unwrap();
            let mut e = [0.0; 3];
            e[k] = 1.0;
            let u = cross(av, e);
            let un = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            let u = [u[0] / un, u[1] / un, u[2] / un];
            let v = cross(av, u);
            let point = |t: f64| [t.cos() * u[0] + t.sin() * v[0], t.cos() * u[1] + t.sin() * v[1], t.cos() * u[2] + t.sin() * v[2]];
            let r_sq = |t: f64| p_norm(&point(t), pv).powi(-2);
            // |x|_p is not smooth where a coordinate of the boundary point vanishes
            let mut breaks = vec![0.0, PI];
            for i in 0..3 {
                let t = (-u[i]).atan2(v[i]).rem_euclid(PI);
                if t > 0.0 && t < PI {
                    breaks.push(t);
                }
            }
            breaks.sort_by(f64::total_cmp);
            let (mut area, mut ok) = (0.0, true);
            for w in breaks.windows(2) {
                let (val, good) = adaptive_simpson(&r_sq, w[0], w[1], BRUTE_TOL * (w[1] - w[0]) / PI);
                area += val;
                ok &= good;
            }
            // half of int_0^(2 pi) r^2 equals int_0^pi r^2
            let g1 = gamma(1.0 + 1.0 / pv)?;
            let unit_area = 4.0 * g1 * g1 / gamma(1.0 + 2.0 / pv)?;
            let value = area / unit_area;
            Ok(SectionEstimate {
                value,
                method: Method::Brute,
                err: BRUTE_TOL * 10.0,
                meta: SectionMeta { degraded: !ok, ..meta },
            })
        }
        n => Err(Error::UnsupportedDimension(n)),
    }
}

/// The cylinder bound A_{n,p}(a) <= 1/a_1.
pub fn cylinder_bound(a: &Direction) -> f64 {
    1.0 / a.a1()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateSource {
    Polya,
    ClosedForm,
    DiagonalLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateRow {
    pub label: String,
    /// k for a^(k); none for the closed forms
    pub k: Option<usize>,
    pub value: f64,
    pub err: f64,
    pub source: CandidateSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateReport {
    pub p: f64,
    pub n: usize,
    /// Sorted by value, largest first.
    pub rows: Vec<CandidateRow>,
}

impl CandidateReport {
    /// Position in `rows` of the Fourier value at a^(k).
    pub fn rank_of(&self, k: usize) -> Option<usize> {
        self.rows.iter().position(|r| r.k == Some(k) && r.source == CandidateSource::Polya)
    }
}

/// A_{n,p} at every a^(k), k = 1..n, with the closed form at a^(2) and the diagonal limit.
pub fn compare_candidates(p: &PExponent, n: usize, spec: &QuadratureSpec) -> Result<CandidateReport> {
    if !(2..=12).contains(&n) {
        return Err(domain(format!("compare_candidates covers 2 <= n <= 12, got {n}")));
    }
    let mut rows = (1..=n)
        .into_par_iter()
        .map(|k| {
            let est = section_polya(p, &Direction::candidate(k, n)?, spec)?;
            Ok(CandidateRow {
                label: format!("a^({k})"),
                k: Some(k),
                value: est.value,
                err: est.err,
                source: CandidateSource::Polya,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let closed = section_closed_forms(p)?;
    rows.push(CandidateRow {
        label: "2^(1/2-1/p)".into(),
        k: None,
        value: closed.a2_value,
        err: 0.0,
        source: CandidateSource::ClosedForm,
    });
    rows.push(CandidateRow {
        label: "diagonal limit".into(),
        k: None,
        value: closed.diag_limit,
        err: 0.0,
        source: CandidateSource::DiagonalLimit,
    });
    rows.sort_by(|a, b| b.value.total_cmp(&a.value));
    Ok(CandidateReport { p: p.value(), n, rows })
}

/// Smallest integer n in [3, n_max] with h_p(n) > h_p(2), if any. Empirical only.
pub fn empirical_crossover_n(p: &PExponent, n_max: usize, spec: &QuadratureSpec) -> Result<Option<usize>> {
    let h2 = h_p(p, 2.0, spec)?.value;
    for n in 3..=n_max {
        if h_p(p, n as f64, spec)?.value > h2 {
            return Ok(Some(n));
        }
    }
    Ok(None)
}

//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature, plus the
//! small root and extremum finders used throughout.
//!
//! The integrator is generic over real and complex integrands. Error
//! estimates follow the QUADPACK heuristic with a round-off floor; panels
//! already at that floor are not subdivided further.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077600854836390,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

/// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values a quadrature rule can accumulate.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Absolute and relative tolerance pair; the target is max(abs, rel * |I|).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tol {
    pub abs: f64,
    pub rel: f64,
}

impl Tol {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tol { abs, rel }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<T> {
    pub value: T,
    pub abs_err: f64,
    /// Integral of |f|, useful as a cancellation gauge.
    pub abs_mass: f64,
    pub panels: usize,
}

/// One GK21 panel: (Kronrod value, error estimate, integral of |f|).
pub fn gk21<T: QuadValue, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[10];
    let mut rg = T::zero();
    let mut resabs = fc.norm() * WGK[10];
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];
    for j in 0..10 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        rk = rk + (f1 + f2) * WGK[j];
        resabs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            rg = rg + (f1 + f2) * WG[j / 2];
        }
    }
    let mean = rk * 0.5;
    let mut resasc = (fc - mean).norm() * WGK[10];
    for j in 0..10 {
        resasc += ((fv1[j] - mean).norm() + (fv2[j] - mean).norm()) * WGK[j];
    }
    let hab = h.abs();
    let value = rk * h;
    resabs *= hab;
    resasc *= hab;
    let mut err = ((rk - rg) * h).norm();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    let floor = 4.0 * f64::EPSILON * resabs;
    (value, err.max(floor), resabs)
}

struct Panel<T> {
    a: f64,
    b: f64,
    value: T,
    err: f64,
    mass: f64,
}

impl<T> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<T> Eq for Panel<T> {}
impl<T> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn at_roundoff(err: f64, mass: f64) -> bool {
    err <= 8.0 * f64::EPSILON * mass
}

/// Adaptive integration over consecutive panels given by `breaks`
/// (sorted, at least two points). The error target is global.
pub fn integrate_breaks<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    breaks: &[f64],
    tol: Tol,
    max_panels: usize,
) -> Result<QuadOutcome<T>> {
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut total_err = 0.0;
    let mut done: Vec<Panel<T>> = Vec::new();
    for w in breaks.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let (v, e, m) = gk21(f, w[0], w[1]);
        total = total + v;
        total_err += e;
        heap.push(Panel { a: w[0], b: w[1], value: v, err: e, mass: m });
    }
    let mut count = heap.len();
    loop {
        let target = tol.abs.max(tol.rel * total.norm());
        if total_err <= target {
            break;
        }
        let Some(worst) = heap.pop() else { break };
        if at_roundoff(worst.err, worst.mass) || (worst.b - worst.a) < 1e-14 * worst.a.abs().max(1.0) {
            // Cannot be improved by subdivision; park it.
            done.push(worst);
            continue;
        }
        if count >= max_panels {
            heap.push(worst);
            return Err(Error::Quadrature { value: total.norm(), achieved: total_err });
        }
        let mid = 0.5 * (worst.a + worst.b);
        let (v1, e1, m1) = gk21(f, worst.a, mid);
        let (v2, e2, m2) = gk21(f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        total_err += e1 + e2 - worst.err;
        heap.push(Panel { a: worst.a, b: mid, value: v1, err: e1, mass: m1 });
        heap.push(Panel { a: mid, b: worst.b, value: v2, err: e2, mass: m2 });
        count += 1;
    }
    // Re-sum from the panels to shed accumulated update round-off.
    let mut value = T::zero();
    let mut err = 0.0;
    let mut mass = 0.0;
    for p in heap.iter().chain(done.iter()) {
        value = value + p.value;
        err += p.err;
        mass += p.mass;
    }
    Ok(QuadOutcome { value, abs_err: err, abs_mass: mass, panels: count })
}

pub fn integrate<T: QuadValue, F: Fn(f64) -> T>(
    f: &F,
    a: f64,
    b: f64,
    tol: Tol,
    max_panels: usize,
) -> Result<QuadOutcome<T>> {
    integrate_breaks(f, &[a, b], tol, max_panels)
}

/// Brent's method for a bracketed root of `f` on [a, b].
pub fn brent_root<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
    max_iter: usize,
) -> Result<f64> {
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::Solver(format!(
            "no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}"
        )));
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok(b);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::Solver(format!("Brent did not converge near {b}")))
}

/// Golden-section search for the maximiser of `f` on [a, b] (unimodal).
/// Returns (argmax, max).
pub fn golden_max<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    xtol: f64,
) -> Result<(f64, f64)> {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > xtol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(if f1 > f2 { (x1, f1) } else { (x2, f2) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..10].iter().sum::<f64>() + WGK[10];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG.iter().sum::<f64>();
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_for_high_degree_polynomials() {
        // K21 integrates degree 31 exactly on [-1, 1].
        for deg in [2usize, 10, 20, 30] {
            let (v, _, _) = gk21(&|x: f64| x.powi(deg as i32), -1.0, 1.0);
            let exact = 2.0 / (deg as f64 + 1.0);
            assert!((v - exact).abs() < 1e-14, "deg {deg}");
        }
    }

    #[test]
    fn adaptive_handles_peaks_and_oscillation() {
        let f = |x: f64| 1.0 / (1e-4 + x * x);
        let r = integrate(&f, -1.0, 1.0, Tol::new(1e-12, 1e-12), 2000).unwrap();
        let exact = 2.0 * (1.0 / 1e-4f64.sqrt()) * (1.0 / 1e-4f64.sqrt()).atan();
        assert!((r.value - exact).abs() < 1e-9 * exact);
        let g = |x: f64| (50.0 * x).cos();
        let r = integrate(&g, 0.0, 3.0, Tol::new(1e-14, 1e-12), 2000).unwrap();
        assert!((r.value - (150f64).sin() / 50.0).abs() < 1e-13);
    }

    #[test]
    fn complex_integrand() {
        let f = |x: f64| Complex64::new(0.0, x).exp();
        let r = integrate(&f, 0.0, 1.0, Tol::new(1e-14, 1e-13), 100).unwrap();
        let exact = Complex64::new(1f64.sin(), 1.0 - 1f64.cos());
        assert!((r.value - exact).norm() < 1e-14);
    }

    #[test]
    fn subdivision_limit_reports_error() {
        let f = |x: f64| (1.0 / x).sin();
        let r = integrate(&f, 1e-6, 1.0, Tol::new(1e-15, 1e-15), 5);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn brent_and_golden() {
        let r = brent_root(|x| Ok(x.cos() - x), 0.0, 1.0, 1e-14, 100).unwrap();
        assert!((r - 0.739_085_133_215_160_6).abs() < 1e-13);
        assert!(brent_root(|x| Ok(x * x + 1.0), -1.0, 1.0, 1e-12, 50).is_err());
        let (x, v) = golden_max(|x| Ok(-(x - 0.3) * (x - 0.3)), 0.0, 1.0, 1e-9).unwrap();
        assert!((x - 0.3).abs() < 1e-8 && v <= 0.0);
    }
}

//! Envelope and shape properties of gamma_p.

use lp_sections::constants::c_p;
use lp_sections::gamma_p::{gamma_p, gamma_p_deriv, three_sinc_n, phi_p, spline_sinc_bound};
use lp_sections::special_fn::gamma;
use lp_sections::{PExponent, QuadratureSpec};
use proptest::prelude::*;

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

fn g1(p: f64) -> f64 {
    gamma(1.0 + 1.0 / p).unwrap()
}

/// Normalised transform Gamma(1+1/p) gamma_p(s), the quantity the envelopes describe.
fn scaled(p: f64, s: f64) -> f64 {
    g1(p) * gamma_p(&pe(p), s, &QuadratureSpec::default()).unwrap()
}

fn s_grid(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| a + (b - a) * i as f64 / (n - 1) as f64)
}

#[test]
fn sinc_proximity() {
    for p in [2.0, 5.0, 15.0, 50.0] {
        let worst = s_grid(0.0, 40.0, 801)
            .map(|s| {
                let (approx, bound) = spline_sinc_bound(&pe(p), s);
                (approx - scaled(p, s)).abs() - bound
            })
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-10, "p = {p}: excess {worst:e}");
    }
}

#[test]
fn three_sinc_proximity() {
    for p in [15.0, 26.0, 100.0, 200.0] {
        let bound = 1.0 / (three_sinc_n(p).unwrap() * p);
        let worst = s_grid(0.01, 40.0, 800)
            .map(|s| (phi_p(&pe(p), s).unwrap() - scaled(p, s)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= bound + 1e-10, "p = {p}: {worst:e} > {bound:e}");
    }
}

#[test]
fn convexity_windows() {
    let spec = QuadratureSpec::default();
    for p in [15.0, 30.0] {
        for s in s_grid(2.5, 5.5, 31) {
            assert!(gamma_p_deriv(&pe(p), s, 2, &spec).unwrap() > 0.0, "p = {p}, s = {s}");
        }
        for s in s_grid(7.0, 8.5, 16) {
            assert!(gamma_p_deriv(&pe(p), s, 2, &spec).unwrap() < 0.0, "p = {p}, s = {s}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gaussian_majorant_on_first_arch(p in 5.0f64..400.0, s in 1e-3f64..3.0) {
        let g = gamma_p(&pe(p), s, &QuadratureSpec::default()).unwrap();
        prop_assert!(g <= (-c_p(p) * s * s).exp() + 1e-10, "p = {p}, s = {s}");
    }

    #[test]
    fn derivative_bound(p in 15.0f64..200.0, s in 0.2f64..40.0) {
        let d = gamma_p_deriv(&pe(p), s, 1, &QuadratureSpec::default()).unwrap();
        prop_assert!(d.abs() <= 1.064 / g1(p) * (1.0 / s + 1.0 / p), "p = {p}, s = {s}: {d}");
    }
}

//! Distribution curves, the layer-cake identity and the h_p comparison.

use lp_sections::ball_inequality::{
    distribution_f, distribution_g_curve, f_sinc_curve, h_p, np_full_check, DistributionCurve, HP_SLACK, NP_U_GRID,
};
use lp_sections::{PExponent, QuadratureSpec};
use proptest::prelude::*;

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn assert_monotone(c: &DistributionCurve) {
    c.validate().unwrap();
    for i in 1..c.len() {
        assert!(c.value_lo[i] <= c.value_lo[i - 1] && c.value_hi[i] <= c.value_hi[i - 1], "x = {}", c.grid[i]);
    }
}

/// Brackets int_0^1 2x F(x) dx between step sums of a nonincreasing F.
fn layer_cake(c: &DistributionCurve) -> (f64, f64) {
    let (xs, n) = (&c.grid, c.len());
    let (mut lo, mut hi) = (xs[0] * xs[0] * c.value_lo[0], 0.0);
    for i in 0..n - 1 {
        let w = xs[i + 1] * xs[i + 1] - xs[i] * xs[i];
        lo += c.value_lo[i + 1] * w;
        hi += c.value_hi[i] * w;
    }
    (lo, hi + c.value_hi[n - 1] * (1.0 - xs[n - 1] * xs[n - 1]))
}

#[test]
fn layer_cake_brackets_the_l2_norm() {
    let spec = QuadratureSpec::default();
    for p in [15.5, 30.0] {
        let x0 = 1.0 / (210.0 * p);
        let c = distribution_f(&PExponent::new(p).unwrap(), &log_grid(x0, 0.999, 300), &spec).unwrap();
        assert_monotone(&c);
        let (lo, hi) = layer_cake(&c);
        // the part below the grid adds at most min(|gamma_p|, x0)^2 over the tail
        assert!(lo <= c.norm_sq.0 && c.norm_sq.1 <= hi + 1e-4, "p = {p}: {lo} {:?} {hi}", c.norm_sq);
    }
}

#[test]
fn sinc_layer_cake() {
    // int_0^inf (sin s / s)^2 ds = pi / 2
    let c = f_sinc_curve(&log_grid(1e-4, 0.999, 400)).unwrap();
    assert_monotone(&c);
    let (lo, hi) = layer_cake(&c);
    let half_pi = std::f64::consts::FRAC_PI_2;
    assert!(lo <= half_pi && half_pi <= hi + 1e-3, "{lo} {hi}");
}

#[test]
fn np_conclusion_transfers_below_p0() {
    let spec = QuadratureSpec::default();
    let p = PExponent::new(24.0).unwrap();
    let r = np_full_check(&p, &spec).unwrap();
    assert!(r.conclusion_ok);
    for &u in &NP_U_GRID {
        let h = h_p(&p, u, &spec).unwrap();
        assert!(h.value <= r.hp_bound + HP_SLACK, "u = {u}: {} > {}", h.value, r.hp_bound);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gaussian_curve_is_exact_and_monotone(coeff in 0.05f64..2.0, n in 3usize..60) {
        let xs = log_grid(1e-6, 0.99, n);
        let c = distribution_g_curve(&xs, coeff).unwrap();
        for (i, &x) in xs.iter().enumerate() {
            let exact = (-x.ln() / coeff).sqrt();
            prop_assert!((c.value_lo[i] - exact).abs() <= 1e-12 * exact.max(1.0));
            prop_assert!(c.value_lo[i] <= c.value_hi[i]);
            if i > 0 {
                prop_assert!(c.value_hi[i] <= c.value_hi[i - 1]);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(3))]

    #[test]
    fn gamma_curves_are_nonincreasing(p in 15.0f64..60.0, n in 20usize..80) {
        let c = distribution_f(&PExponent::new(p).unwrap(), &log_grid(1e-3, 0.99, n), &QuadratureSpec::default()).unwrap();
        assert_monotone(&c);
    }
}

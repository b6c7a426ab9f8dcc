//! Invariants of the closed-form constants.

mod common;

use common::oracles;
use lp_sections::constants::*;
use lp_sections::PExponent;
use proptest::prelude::*;

fn at(p: f64) -> CriticalConstants {
    constants_at(&PExponent::new(p).unwrap()).unwrap()
}

#[test]
fn critical_exponents_match_fixtures() {
    let o = oracles();
    assert!((solve_p0().unwrap() - o.scalar("p0")).abs() < 1e-8);
    assert!((solve_p1().unwrap() - o.scalar("p1")).abs() < 1e-8);
    assert!((solve_p2().unwrap() - o.scalar("p2")).abs() < 1e-8);
}

#[test]
fn threshold_sits_below_the_linear_bound() {
    for p in [20.0, solve_p0().unwrap()] {
        let k = at(p);
        assert!(k.a1_threshold < std::f64::consts::FRAC_1_SQRT_2 + 1.0 / (3.0 * p) + 1.0 / 150.0);
    }
}

#[test]
fn crossing_values() {
    let k = at(solve_p0().unwrap());
    assert!((k.c_p - k.d_p).abs() < 1e-10);
    assert!((k.c_p - 0.1609).abs() < 5e-4);
    let c2 = at(solve_p2().unwrap()).c_p;
    assert!((c2 - 0.15715).abs() < 1e-4);
}

#[test]
fn closed_forms_of_sections() {
    let f = section_closed_forms(&PExponent::new(6.0).unwrap()).unwrap();
    assert!((f.a2_value - 2f64.powf(1.0 / 3.0)).abs() < 1e-15);
    let f = section_closed_forms(&PExponent::new(2.0).unwrap()).unwrap();
    assert!((f.diag_limit - 1.0).abs() < 1e-14 && (f.a2_value - 1.0).abs() < 1e-15);
}

proptest! {
    #[test]
    fn sign_structure_splits_at_p0(p in 2.01f64..400.0) {
        let p0 = solve_p0().unwrap();
        prop_assume!((p - p0).abs() > 1e-6);
        let k = at(p);
        if p < p0 {
            prop_assert!(k.c_p < k.d_p && k.h2 < k.h_inf);
        } else {
            prop_assert!(k.d_p < k.c_p && k.h_inf < k.h2);
        }
    }

    #[test]
    fn d_p_decreases(p in 2.0f64..500.0, dp in 0.01f64..5.0) {
        prop_assert!(d_p(p + dp) < d_p(p));
    }

    #[test]
    fn c_p_is_unimodal_about_p2(p in 2.0f64..500.0, dp in 0.01f64..5.0) {
        let p2 = solve_p2().unwrap();
        if p + dp < p2 {
            prop_assert!(c_p(p + dp) < c_p(p));
        } else if p > p2 {
            prop_assert!(c_p(p + dp) > c_p(p));
        }
    }

    #[test]
    fn h_values_follow_constants(p in 2.0f64..300.0) {
        let k = at(p);
        let pi = std::f64::consts::PI;
        prop_assert!((k.h2 * 2.0 * (k.d_p / pi).sqrt() - 1.0).abs() < 1e-14);
        prop_assert!((k.ratio_r - phi_crossing(p).unwrap()).abs() < 1e-13);
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so the report is printed on every run. Sub-checks
//! listed in `KNOWN_UNATTAINED` are allowed to fail; every other failure,
//! including an exceeded runtime budget, makes the target fail.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::oracles;
use lp_sections::ball_inequality::{
    f_sinc_distribution, h_p, h_p_deriv_at_2, landmark_ratio_margins, np_full_check, psi_a_margin, sinc_bump_max,
    PsiRegime, HP_SLACK, NP_U_GRID,
};
use lp_sections::constants::{c_p, constants_at, d_p, section_closed_forms, solve_p0, solve_p1, solve_p2};
use lp_sections::gamma_p::{
    gamma_p, gamma_p_tail, three_sinc_n, phi_p, psi1, psi2, psi3, spline_l1_error, spline_sinc_bound, tail_asymptote,
    tail_threshold, P_INFINITY_PROXY,
};
use lp_sections::sections::{radial_ks_distance, section_brute, section_mc, section_polya, Direction};
use lp_sections::special_fn::gamma;
use lp_sections::{PExponent, QuadratureSpec, Result};

/// Sub-checks that do not reproduce; see the decisions ledger.
const KNOWN_UNATTAINED: [&str; 3] = ["9:y2", "13:coarse A=p p=400", "13:coarse A=10 p=265"];

struct Check {
    name: String,
    detail: String,
    pass: bool,
}

fn check(name: impl Into<String>, pass: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), detail: detail.into(), pass }
}

fn approx(name: &str, got: f64, want: f64, tol: f64) -> Check {
    check(name, (got - want).abs() <= tol, format!("{got:.7} vs {want} +- {tol:e}"))
}

fn pe(p: f64) -> PExponent {
    PExponent::new(p).unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

fn scaled_gamma(p: f64, s: f64) -> Result<f64> {
    Ok(gamma(1.0 + 1.0 / p)? * gamma_p(&pe(p), s, &spec())?)
}

fn c1_critical_exponents() -> Result<Vec<Check>> {
    Ok(vec![
        approx("p0", solve_p0()?, 26.265, 0.005),
        approx("p1", solve_p1()?, 4.192, 0.005),
        approx("p2", solve_p2()?, 9.1147, 0.001),
    ])
}

fn c2_constants() -> Result<Vec<Check>> {
    let (p0, p2) = (solve_p0()?, solve_p2()?);
    Ok(vec![
        approx("c_2", c_p(2.0), 0.25, 1e-12),
        approx("d_2", d_p(2.0), 0.25, 1e-12),
        approx("c_p2", c_p(p2), 0.15715, 1e-4),
        approx("c_15", c_p(15.0), 0.1584, 5e-4),
        approx("c_p0", c_p(p0), 0.1609, 5e-4),
        approx("d_p0", d_p(p0), 0.1609, 5e-4),
        approx("d_inf", d_p(P_INFINITY_PROXY), 0.15915, 1e-5),
    ])
}

fn c3_plancherel() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [3.0, 5.5, 15.0, 26.265, 100.0] {
        let h = h_p(&pe(p), 2.0, &spec())?.value;
        let dev = (h * 2.0 * (d_p(p) / PI).sqrt() - 1.0).abs();
        out.push(check(format!("p={p}"), dev <= 1e-6, format!("{dev:.1e}")));
    }
    Ok(out)
}

fn c4_sections() -> Result<Vec<Check>> {
    let a = |p: f64, k: usize, n: usize| -> Result<f64> {
        Ok(section_polya(&pe(p), &Direction::candidate(k, n)?, &spec())?.value)
    };
    Ok(vec![
        approx("A_3,6(a3)", a(6.0, 3, 3)?, 1.250, 0.005),
        approx("A_4,8(a4)", a(8.0, 4, 4)?, 1.295, 0.005),
        approx("A_4,8(a3)", a(8.0, 3, 4)?, 1.270, 0.005),
        approx("A_3,6(a2)", a(6.0, 2, 3)?, 2f64.powf(1.0 / 3.0), 1e-12),
        approx("A_4,8(a2)", a(8.0, 2, 4)?, 2f64.powf(3.0 / 8.0), 1e-12),
        approx("closed form p=8", section_closed_forms(&pe(8.0))?.a2_value, 2f64.powf(3.0 / 8.0), 1e-12),
    ])
}

fn c5_oracle_equivalence() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let ps = [3.0, 6.0, 26.265];
    let mut worst_brute: f64 = 0.0;
    let mut out = Vec::new();
    for i in 0..20 {
        let (n, p) = (2 + i % 2, ps[i % 3]);
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let a = Direction::normalized(&v)?;
        let polya = section_polya(&pe(p), &a, &spec())?.value;
        let brute = section_brute(&pe(p), &a)?.value;
        worst_brute = worst_brute.max((polya - brute).abs());
        if i < 5 {
            let mc = section_mc(&pe(p), &a, 1_000_000, 100 + i as u64)?;
            let z = (mc.value - polya).abs() / mc.err;
            out.push(check(format!("mc case {i}"), z <= 3.0, format!("{z:.2} SE")));
        }
    }
    out.insert(0, check("polya vs brute", worst_brute <= 1e-5, format!("max {worst_brute:.1e}")));
    Ok(out)
}

fn c6_hp_derivative() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for (p, bound, above) in [(4.0, 0.009, true), (4.3, 0.002, true), (4.5, -0.002, false)] {
        let d = h_p_deriv_at_2(&pe(p), &spec())?;
        let sign_ok = if above { d.value > bound } else { d.value < bound };
        out.push(check(
            format!("h_{p}'(2)"),
            sign_ok && d.error_estimate < 5e-4,
            format!("{:.6} (err {:.1e})", d.value, d.error_estimate),
        ));
    }
    Ok(out)
}

fn c7_gaussian_majorant() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [5.0, 9.0, 15.0, 26.265, 100.0] {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..=300 {
            let s = 0.01 * k as f64;
            worst = worst.max(gamma_p(&pe(p), s, &spec())? - (-c_p(p) * s * s).exp());
        }
        out.push(check(format!("p={p}"), worst <= 1e-10, format!("max excess {worst:.1e}")));
    }
    Ok(out)
}

fn c8_envelopes() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let grid: Vec<f64> = (1..=2000).map(|k| 0.02 * k as f64).collect();
    for p in [15.0, 26.0, 100.0, 200.0] {
        let (mut sinc_dev, mut phi_dev): (f64, f64) = (0.0, 0.0);
        for &s in &grid {
            let g = scaled_gamma(p, s)?;
            sinc_dev = sinc_dev.max((spline_sinc_bound(&pe(p), s).0 - g).abs());
            phi_dev = phi_dev.max((phi_p(&pe(p), s)? - g).abs());
        }
        let phi_bound = 1.0 / (three_sinc_n(p)? * p);
        out.push(check(format!("sinc p={p}"), sinc_dev <= 1.016 / p, format!("{sinc_dev:.2e}")));
        out.push(check(format!("three-sinc p={p}"), phi_dev <= phi_bound, format!("{phi_dev:.2e} <= {phi_bound:.2e}")));
        let l1 = spline_l1_error(&pe(p))?;
        out.push(check(format!("spline L1 p={p}"), l1.total <= l1.bound, format!("{:.2e}", l1.total)));
    }
    // the stated psi2, psi3 bounds are the values at p0; see the ledger
    let p0 = solve_p0()?;
    let components = [
        ("psi1(inf)", psi1(f64::INFINITY)?, 0.06791, None),
        ("psi2(p0)", psi2(p0)?, 0.05675, Some(psi2(26.0)?)),
        ("psi3(inf,p0)", psi3(f64::INFINITY, p0)?, 0.01993, Some(psi3(f64::INFINITY, 26.0)?)),
    ];
    for (name, v, stated, at_26) in components {
        let mut detail = format!("{v:.6} vs {stated}");
        if let Some(w) = at_26 {
            detail += &format!(" (at 26: {w:.6})");
        }
        out.push(check(name, v <= stated && stated - v <= 1e-4, detail));
    }
    Ok(out)
}

fn c9_sinc_bumps() -> Result<Vec<Check>> {
    let (s1, y1) = sinc_bump_max(1)?;
    let (s2, y2) = sinc_bump_max(2)?;
    Ok(vec![
        approx("y1", y1, 0.21723, 1e-4),
        approx("s1", s1, 4.493, 1e-3),
        approx("y2", y2, 0.12827, 1e-4),
        approx("s2", s2, 7.725, 1e-3),
    ])
}

fn c10_f_sinc() -> Result<Vec<Check>> {
    let (lo, hi): (f64, f64) = (1e-4, 1.0 / (2.0 * PI));
    let mut violations = 0;
    let mut min_slack = f64::INFINITY;
    for k in 1..=200 {
        let x = lo * (hi / lo).powf(k as f64 / 201.0);
        let f = f_sinc_distribution(x)?;
        min_slack = min_slack.min(f.numeric - f.lower_bound);
        violations += (f.numeric < f.lower_bound) as usize;
    }
    Ok(vec![check("200 levels", violations == 0, format!("{violations} violations, min slack {min_slack:.4}"))])
}

fn c11_tail() -> Result<Vec<Check>> {
    let p = pe(5.5);
    let threshold = tail_threshold(&p)?;
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let s = threshold * 1.25f64.powi(k);
        worst = worst.max((gamma_p(&p, s, &spec())? / tail_asymptote(&p, s)? - 1.0).abs());
    }
    let want = oracles().gamma_p_at(5.5, 40.0, 0);
    let got = gamma_p_tail(&p, 40.0, &spec())?;
    let rel = ((got - want) / want).abs();
    Ok(vec![
        check("tail ratio", worst < 0.5, format!("max |ratio - 1| {worst:.1e}")),
        check("contour s=40", rel <= 1e-6, format!("rel {rel:.1e}")),
    ])
}

fn c12_np_pipeline() -> Result<Vec<Check>> {
    let mut out = Vec::new();
    for p in [30.0, 22.0] {
        let r = np_full_check(&pe(p), &spec())?;
        let consts = constants_at(&pe(p))?;
        let bound = if p >= solve_p0()? { consts.h2 } else { consts.h_inf };
        let crossing_ok = r.crossing_x0.is_some_and(|x0| x0 > 1.0 / 20.0 && x0 < r.x1);
        out.push(check(
            format!("p={p} conclusion"),
            r.conclusion_ok && crossing_ok,
            format!("x0 {:?}, x1 {:.4}", r.crossing_x0, r.x1),
        ));
        let mut worst = f64::NEG_INFINITY;
        for &u in &NP_U_GRID {
            worst = worst.max(h_p(&pe(p), u, &spec())?.value - bound);
        }
        out.push(check(format!("p={p} h_p(u) bound"), worst <= HP_SLACK, format!("max excess {worst:.1e}")));
        if p == 30.0 {
            for m in landmark_ratio_margins() {
                let numeric = r.ratio_landmarks.iter().find(|(x, _)| (x - m.x).abs() < 1e-12).map(|&(_, v)| v);
                out.push(check(
                    format!("margin x={:.3}", m.x),
                    m.unrounded > m.claimed && numeric.is_some_and(|v| v > m.claimed),
                    format!("{:.4} (rounded {:.4}), gamma_30 {:.3?} > {}", m.unrounded, m.rounded, numeric, m.claimed),
                ));
            }
        }
    }
    Ok(out)
}

fn c13_psi_margins() -> Result<Vec<Check>> {
    use PsiRegime::*;
    let p0 = solve_p0()?;
    let cases: [(&str, f64, f64, PsiRegime, f64); 9] = [
        ("coarse A=p p=400", 400.0, 400.0, Coarse, 2.0),
        ("coarse A=10 p=265", 265.0, 10.0, Coarse, 1.0),
        ("refined_175 A=p p=50", 50.0, 50.0, Refined175, 2.0),
        ("refined_175 A=p^5 p=175", 175.0, 175f64.powi(5), Refined175, 0.0),
        ("refined_26 A=2 p=26.5", 26.5, 2.0, Refined26, 0.0),
        ("refined_26 A=3/2 p=p0", p0, 1.5, Refined26, 0.0),
        ("refined_26 A=10 p=37", 37.0, 10.0, Refined26, 0.0),
        ("refined_26 A=p p=46", 46.0, 46.0, Refined26, 0.0),
        ("refined_20 A=15/14 p=20.2", 20.2, 15.0 / 14.0, Refined20, 0.0),
    ];
    cases
        .iter()
        .map(|&(name, p, a, regime, above)| {
            let m = psi_a_margin(p, a, regime)?;
            Ok(check(name, m > above, format!("{m:.4} > {above}")))
        })
        .collect()
}

fn c14_radial_ks() -> Result<Vec<Check>> {
    [3.0, 30.0]
        .iter()
        .map(|&p| {
            let d = radial_ks_distance(&pe(p), 1_000_000, 7)?;
            Ok(check(format!("p={p}"), d < 0.002, format!("{d:.5}")))
        })
        .collect()
}

type Criterion = (u32, &'static str, u64, fn() -> Result<Vec<Check>>);

const CRITERIA: [Criterion; 14] = [
    (1, "critical exponents", 1, c1_critical_exponents),
    (2, "comparator constants", 1, c2_constants),
    (3, "Plancherel identity for h_p(2)", 30, c3_plancherel),
    (4, "section values and closed forms", 120, c4_sections),
    (5, "polya, brute and Monte Carlo agree", 300, c5_oracle_equivalence),
    (6, "signs of h_p'(2)", 60, c6_hp_derivative),
    (7, "Gaussian majorant on [0, 3]", 120, c7_gaussian_majorant),
    (8, "sinc and three-sinc envelopes", 120, c8_envelopes),
    (9, "sinc bump landmarks", 1, c9_sinc_bumps),
    (10, "F_sinc lower bound", 10, c10_f_sinc),
    (11, "power-law tail and rotated contour", 60, c11_tail),
    (12, "distribution-function comparison", 600, c12_np_pipeline),
    (13, "psi_A margins", 1, c13_psi_margins),
    (14, "radial sampler KS distance", 30, c14_radial_ks),
];

fn main() {
    let mut unexpected = Vec::new();
    for (id, title, budget, run) in CRITERIA {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let mut checks = match outcome {
            Ok(c) => c,
            Err(e) => vec![check("evaluation", false, e.to_string())],
        };
        checks.push(check("runtime", elapsed <= Duration::from_secs(budget), format!("{:.2} s <= {budget} s", elapsed.as_secs_f64())));
        let failed: Vec<&Check> = checks.iter().filter(|c| !c.pass).collect();
        let status = if failed.is_empty() { "PASS" } else { "FAIL" };
        let detail = if failed.is_empty() {
            format!("{:.2} s", elapsed.as_secs_f64())
        } else {
            failed.iter().map(|c| format!("{}: {}", c.name, c.detail)).collect::<Vec<_>>().join("; ")
        };
        println!("{status} {id:>2} {title} [{detail}]");
        for c in &checks {
            println!("        {} {}: {}", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
        }
        for c in failed {
            let key = format!("{id}:{}", c.name);
            if !KNOWN_UNATTAINED.contains(&key.as_str()) {
                unexpected.push(key);
            }
        }
    }
    println!("known unattained: {}", KNOWN_UNATTAINED.join(", "));
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}

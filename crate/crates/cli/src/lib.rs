//! The `lpsec` command-line front end.
//!
//! Exit status: 0 on success, 2 for invalid input, 3 for a degraded or
//! indeterminate result under `--strict` (and for numerical failures).

pub mod args;
pub mod config;
pub mod output;
pub mod reproduce;

use std::process::ExitCode;

use serde::{Deserialize, Serialize};

use lp_sections::ball_inequality::{f_sinc_distribution, h_p, h_p_deriv_at_2, h_p_sweep, np_full_check, FSinc, Verdict};
use lp_sections::constants::{constants_at, solve_p0, solve_p1, solve_p2, CriticalConstants};
use lp_sections::gamma_p::{bump_profile, gamma_p, gamma_p_deriv};
use lp_sections::sections::{
    compare_candidates, radial_ks_distance, section_brute, section_mc, section_polya, Direction, SectionEstimate,
};
use lp_sections::{Error, PExponent, QuadratureSpec};

use args::{Cli, Command, DirectionArgs, GammaCmd, HpCmd, MethodArg, NpCmd, SectionCmd};
use config::Settings;
use output::{Cell, Emission, Table};

pub const DEFAULT_SAMPLES: u64 = 1_000_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Failure {
    Validation(String),
    Numerical(String),
    Internal(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Internal(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain(_) | Error::Validation(_) | Error::UnsupportedDimension(_) | Error::Regime(_) => {
                Failure::Validation(e.to_string())
            }
            Error::Quadrature { .. } | Error::Resolution(_) | Error::Solver(_) => Failure::Numerical(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub constants: CriticalConstants,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRow {
    pub p: f64,
    pub s: f64,
    pub order: u8,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZerosReport {
    pub p: f64,
    pub s_max: f64,
    pub zeros: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    pub estimate: SectionEstimate,
    /// KS distance of the radial sampler against the numeric CDF.
    pub radial_ks: Option<f64>,
}

fn exponent(p: f64) -> Result<PExponent, Failure> {
    Ok(PExponent::new(p)?)
}

fn spec_from(settings: &Settings) -> Result<QuadratureSpec, Failure> {
    let d = QuadratureSpec::default();
    let spec = d.with_tol(settings.abs_tol.unwrap_or(d.abs_tol), settings.rel_tol.unwrap_or(d.rel_tol));
    spec.validate()?;
    Ok(spec)
}

/// `diag`, `a<k>` / `e1`, or an explicit comma list (validated, not normalised).
pub fn parse_direction(spec: &str, n: usize) -> Result<Direction, Failure> {
    let s = spec.trim();
    let d = if s == "diag" {
        Direction::candidate(n, n)
    } else if s == "e1" {
        Direction::candidate(1, n)
    } else if let Some(k) = s.strip_prefix('a').and_then(|k| k.parse::<usize>().ok()) {
        Direction::candidate(k, n)
    } else {
        let coords = s
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Validation(format!("direction {s:?}: {e}")))?;
        if coords.len() != n {
            return Err(Failure::Validation(format!("direction has {} coordinates but n = {n}", coords.len())));
        }
        Direction::new(coords)
    };
    Ok(d?)
}

/// The serde name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> Cell {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => Cell::Text(s),
        _ => Cell::Empty,
    }
}

fn section_table(e: &SectionEstimate) -> Table {
    let mut t = Table::new(&["method", "A [-]", "err [-]", "samples", "seed", "truncation s [-]", "degraded"]);
    t.push(vec![
        label(&e.method),
        e.value.into(),
        e.err.into(),
        e.meta.samples.map_or(Cell::Empty, |v| Cell::Int(v as i64)),
        e.meta.seed.map_or(Cell::Empty, |v| Cell::Int(v as i64)),
        e.meta.truncation.into(),
        e.meta.degraded.into(),
    ]);
    t
}

fn section_estimate(d: &DirectionArgs, method: MethodArg, samples: u64, seed: u64, spec: &QuadratureSpec) -> Result<SectionEstimate, Failure> {
    let p = exponent(d.p)?;
    let a = parse_direction(&d.a, d.n)?;
    Ok(match method {
        MethodArg::Polya => section_polya(&p, &a, spec)?,
        MethodArg::Mc => section_mc(&p, &a, samples, seed)?,
        MethodArg::Brute => section_brute(&p, &a)?,
    })
}

/// Runs one parsed command.
pub fn execute(command: &Command, settings: &Settings) -> Result<Emission, Failure> {
    let spec = spec_from(settings)?;
    let samples = |v: Option<u64>| v.or(settings.samples).unwrap_or(DEFAULT_SAMPLES);
    let seed = |v: Option<u64>| v.or(settings.seed).unwrap_or(DEFAULT_SEED);
    match command {
        Command::Constants { p } => {
            let report = ConstantsReport {
                constants: constants_at(&exponent(*p)?)?,
                p0: solve_p0()?,
                p1: solve_p1()?,
                p2: solve_p2()?,
            };
            Emission::record(&report)
        }
        Command::Gamma(GammaCmd::Eval { p, s, deriv }) => {
            let pe = exponent(*p)?;
            if *deriv > 2 {
                return Err(Failure::Validation(format!("--deriv must be 0, 1 or 2, got {deriv}")));
            }
            let rows = s
                .0
                .iter()
                .map(|&s| {
                    let value = if *deriv == 0 { gamma_p(&pe, s, &spec)? } else { gamma_p_deriv(&pe, s, *deriv, &spec)? };
                    Ok(GammaRow { p: *p, s, order: *deriv, value })
                })
                .collect::<Result<Vec<_>, Failure>>()?;
            let mut t = Table::new(&["p [-]", "s [-]", "order", "value [-]"]);
            for r in &rows {
                t.push(vec![r.p.into(), r.s.into(), Cell::Int(r.order as i64), r.value.into()]);
            }
            Emission::new(&rows, t)
        }
        Command::Gamma(GammaCmd::Zeros { p, s_max }) => {
            let prof = bump_profile(&exponent(*p)?, *s_max, &spec)?;
            let report = ZerosReport { p: *p, s_max: *s_max, zeros: prof.zeros };
            let mut t = Table::new(&["k", "zero s [-]"]);
            for (k, z) in report.zeros.iter().enumerate() {
                t.push(vec![Cell::Int(k as i64 + 1), (*z).into()]);
            }
            Emission::new(&report, t)
        }
        Command::Gamma(GammaCmd::Bumps { p, s_max }) => {
            let prof = bump_profile(&exponent(*p)?, *s_max, &spec)?;
            let mut t = Table::new(&["k", "s [-]", "|gamma_p| [-]", "sign"]);
            for (k, e) in prof.extrema.iter().enumerate() {
                t.push(vec![Cell::Int(k as i64), e.s.into(), e.abs_value.into(), Cell::Int(e.sign as i64)]);
            }
            Emission::new(&prof, t)
        }
        Command::Hp(HpCmd::Eval { p, u }) => {
            let h = h_p(&exponent(*p)?, *u, &spec)?;
            Emission::record(&h).map(|e| e.warn_if(h.degraded, "h_p tolerance not reached"))
        }
        Command::Hp(HpCmd::Sweep { p, u }) => {
            let hs = h_p_sweep(&exponent(*p)?, &u.0, &spec)?;
            let mut t = Table::new(&["u [-]", "h_p [-]", "error bound [-]", "s_end [-]", "tail", "degraded"]);
            for h in &hs {
                t.push(vec![
                    h.u.into(),
                    h.value.into(),
                    h.error_bound().into(),
                    h.s_end.into(),
                    label(&h.tail),
                    h.degraded.into(),
                ]);
            }
            let degraded = hs.iter().any(|h| h.degraded);
            Emission::new(&hs, t).map(|e| e.warn_if(degraded, "some h_p values did not reach tolerance"))
        }
        Command::Hp(HpCmd::Deriv2 { p }) => Emission::record(&h_p_deriv_at_2(&exponent(*p)?, &spec)?),
        Command::Np(NpCmd::Check { p }) => {
            let r = np_full_check(&exponent(*p)?, &spec)?;
            let indeterminate = r.upper_range == Verdict::Indeterminate || r.lower_range == Verdict::Indeterminate;
            Emission::record(&r).map(|e| {
                e.warn_if(indeterminate || !r.indeterminate_windows.is_empty(), "sign of F - G indeterminate on part of the grid")
                    .warn_if(!r.conclusion_ok, "the comparison did not conclude")
            })
        }
        Command::Fsinc { x } => {
            let rows = x.0.iter().map(|&x| Ok(f_sinc_distribution(x)?)).collect::<Result<Vec<FSinc>, Failure>>()?;
            let mut t = Table::new(&["x [-]", "F_sinc [-]", "lower bound [-]", "bound applies"]);
            for r in &rows {
                t.push(vec![r.x.into(), r.numeric.into(), r.lower_bound.into(), r.bound_applies.into()]);
            }
            Emission::new(&rows, t)
        }
        Command::Section(SectionCmd::Eval { dir, method, samples: n, seed: sd }) => {
            let e = section_estimate(dir, *method, samples(*n), seed(*sd), &spec)?;
            Ok(Emission::new(&e, section_table(&e))?.warn_if(e.meta.degraded, "section estimate is degraded"))
        }
        Command::Section(SectionCmd::Mc { dir, samples: n, seed: sd, ks }) => {
            let (n, sd) = (samples(*n), seed(*sd));
            let estimate = section_estimate(dir, MethodArg::Mc, n, sd, &spec)?;
            let radial_ks = if *ks { Some(radial_ks_distance(&exponent(dir.p)?, n, sd)?) } else { None };
            let mut t = section_table(&estimate);
            t.headers.push("radial KS [-]".into());
            t.rows[0].push(radial_ks.into());
            Emission::new(&McReport { estimate, radial_ks }, t)
        }
        Command::Section(SectionCmd::Compare { p, n }) => {
            let r = compare_candidates(&exponent(*p)?, *n, &spec)?;
            let mut t = Table::new(&["rank", "candidate", "k", "A [-]", "err [-]", "source"]);
            for (i, row) in r.rows.iter().enumerate() {
                t.push(vec![
                    Cell::Int(i as i64 + 1),
                    row.label.as_str().into(),
                    row.k.map_or(Cell::Empty, |k| Cell::Int(k as i64)),
                    row.value.into(),
                    row.err.into(),
                    label(&row.source),
                ]);
            }
            Emission::new(&r, t)
        }
        Command::Reproduce { id, p } => {
            let Some(result) = reproduce::reproduce(id, *p, &spec) else {
                return Err(Failure::Validation(format!(
                    "unknown report {id:?}; available: {}",
                    reproduce::REPORT_IDS.join(", ")
                )));
            };
            let report = result?;
            let mut t = Table::new(&["quantity", "quoted [-]", "computed [-]", "relation", "tolerance [-]", "pass"]);
            for r in &report.rows {
                t.push(vec![
                    r.quantity.as_str().into(),
                    r.quoted.into(),
                    r.computed.into(),
                    label(&r.relation),
                    r.tolerance.into(),
                    r.pass.into(),
                ]);
            }
            let failed: Vec<&str> = report.rows.iter().filter(|r| !r.pass).map(|r| r.quantity.as_str()).collect();
            let msg = format!("rows not reproduced: {}", failed.join("; "));
            Ok(Emission::new(&report, t)?.warn_if(!failed.is_empty(), msg))
        }
    }
}

fn init_threads(threads: Option<usize>) {
    if let Some(n) = threads {
        // a second initialisation (in-process tests) is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses arguments, runs, writes the output, and maps the result to an exit status.
pub fn run<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match <Cli as clap::Parser>::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run_cli(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("lpsec: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn run_cli(cli: &Cli) -> Result<u8, Failure> {
    let settings = Settings::resolve(&cli.global)?;
    init_threads(settings.threads);
    let emission = execute(&cli.command, &settings)?;
    let text = emission.render(settings.format)?;
    match &settings.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    for w in &emission.warnings {
        eprintln!("lpsec: warning: {w}");
    }
    Ok(if settings.strict && !emission.warnings.is_empty() { 3 } else { 0 })
}

use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "lpsec", version, about = "Sections of l_p balls and the Fourier transform of exp(-|r|^p)")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalOpts,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalOpts {
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write the result here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Exit with status 3 when a result is degraded or indeterminate.
    #[arg(long, global = true)]
    pub strict: bool,

    /// Key-value file supplying defaults (key = value per line).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, env = "LPSEC_THREADS")]
    pub threads: Option<usize>,

    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,

    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <Format as ValueEnum>::from_str(s, true)
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Critical constants at p and the exponents p0, p1, p2.
    Constants {
        #[arg(long)]
        p: f64,
    },
    #[command(subcommand)]
    /// The transform gamma_p: values, zeros and bumps.
    Gamma(GammaCmd),
    #[command(subcommand)]
    /// The integral h_p(u).
    Hp(HpCmd),
    #[command(subcommand)]
    /// Distribution-function comparison against a Gaussian.
    Np(NpCmd),
    /// Measure of {|sin s / s| > x} against (2/pi)/x - 27/16.
    Fsinc {
        #[arg(long)]
        x: Grid,
    },
    #[command(subcommand)]
    /// Normalised section volumes A_{n,p}(a).
    Section(SectionCmd),
    /// Tables comparing quoted values with recomputed ones.
    Reproduce {
        id: String,
        #[arg(long)]
        p: Option<f64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum GammaCmd {
    /// gamma_p or a derivative on a grid of s.
    Eval {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s: Grid,
        #[arg(long, default_value_t = 0)]
        deriv: u8,
    },
    /// Zeros of gamma_p on [0, s_max].
    Zeros {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s_max: f64,
    },
    /// Zeros, extrema and the landmark maxima x1, x2.
    Bumps {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        s_max: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum HpCmd {
    /// h_p(u) = sqrt(u) int |gamma_p|^u.
    Eval {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        u: f64,
    },
    /// h_p(u) on a grid of u.
    Sweep {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        u: Grid,
    },
    /// h_p'(2) with its finite-difference cross-check.
    Deriv2 {
        #[arg(long)]
        p: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum NpCmd {
    /// The full distribution-function comparison for p >= 20.
    Check {
        #[arg(long)]
        p: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Polya,
    Mc,
    Brute,
}

#[derive(Debug, Clone, Args)]
pub struct DirectionArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub n: usize,
    /// `diag` for a^(n), `a<k>` for a^(k), or an explicit comma list.
    #[arg(long)]
    pub a: String,
}

#[derive(Debug, Subcommand)]
pub enum SectionCmd {
    /// One direction by a chosen method.
    Eval {
        #[command(flatten)]
        dir: DirectionArgs,
        #[arg(long, value_enum, default_value_t = MethodArg::Polya)]
        method: MethodArg,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Every a^(k), k = 1..n, with the closed forms, sorted.
    Compare {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        n: usize,
    },
    /// Monte Carlo estimate, optionally with the radial sampler's KS distance.
    Mc {
        #[command(flatten)]
        dir: DirectionArgs,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ks: bool,
    },
}

/// Points given as `a:b:n` (linear), `log:a:b:n` (geometric) or `v1,v2,...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid(pub Vec<f64>);

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("bad number {t:?}: {e}"));
        let parts: Vec<&str> = s.split(':').collect();
        let (log, parts) = match parts.first() {
            Some(&"log") => (true, &parts[1..]),
            _ => (false, &parts[..]),
        };
        let points = match parts.len() {
            1 if !log => parts[0].split(',').map(num).collect::<Result<Vec<_>, _>>()?,
            3 => {
                let (a, b) = (num(parts[0])?, num(parts[1])?);
                let n: usize = parts[2].trim().parse().map_err(|e| format!("bad count {:?}: {e}", parts[2]))?;
                if n == 0 || !(a.is_finite() && b.is_finite()) {
                    return Err("a range needs finite ends and at least one point".into());
                }
                if log && !(a > 0.0 && b > 0.0) {
                    return Err("a log range needs positive ends".into());
                }
                (0..n)
                    .map(|k| {
                        let t = if n == 1 { 0.0 } else { k as f64 / (n - 1) as f64 };
                        if log {
                            a * (b / a).powf(t)
                        } else {
                            a + (b - a) * t
                        }
                    })
                    .collect()
            }
            _ => return Err(format!("cannot parse {s:?}; use a:b:n, log:a:b:n or a comma list")),
        };
        if points.is_empty() || points.iter().any(|v| !v.is_finite()) {
            return Err("the grid must be nonempty and finite".into());
        }
        Ok(Grid(points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("1,2.5".parse::<Grid>().unwrap().0, vec![1.0, 2.5]);
        assert_eq!("0:1:3".parse::<Grid>().unwrap().0, vec![0.0, 0.5, 1.0]);
        let g = "log:1:100:3".parse::<Grid>().unwrap().0;
        assert!((g[1] - 10.0).abs() < 1e-12 && g[2] == 100.0);
        assert!("log:0:1:3".parse::<Grid>().is_err());
        assert!("1:2".parse::<Grid>().is_err());
        assert!("".parse::<Grid>().is_err());
    }
}

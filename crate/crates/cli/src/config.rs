//! Defaults from a `key = value` file; command-line flags take precedence.

use std::path::{Path, PathBuf};

use crate::args::{Format, GlobalOpts};
use crate::Failure;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileConfig {
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub strict: Option<bool>,
    pub threads: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

fn parse_value<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, Failure>
where
    T::Err: std::fmt::Display,
{
    v.parse().map_err(|e| Failure::Validation(format!("config key {key}: {e}")))
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut c = FileConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Validation(format!("config line {}: expected key = value", i + 1)));
            };
            let (key, v) = (key.trim().replace('-', "_"), value.trim());
            match key.as_str() {
                "format" => c.format = Some(parse_value(&key, v)?),
                "out" => c.out = Some(PathBuf::from(v)),
                "strict" => c.strict = Some(parse_value(&key, v)?),
                "threads" => c.threads = Some(parse_value(&key, v)?),
                "rel_tol" => c.rel_tol = Some(parse_value(&key, v)?),
                "abs_tol" => c.abs_tol = Some(parse_value(&key, v)?),
                "seed" => c.seed = Some(parse_value(&key, v)?),
                "samples" => c.samples = Some(parse_value(&key, v)?),
                other => return Err(Failure::Validation(format!("unknown config key {other:?}"))),
            }
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Validation(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Settings after merging flags, environment and the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub format: Format,
    pub out: Option<PathBuf>,
    pub strict: bool,
    pub threads: Option<usize>,
    pub rel_tol: Option<f64>,
    pub abs_tol: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl Settings {
    pub fn resolve(g: &GlobalOpts) -> Result<Self, Failure> {
        let file = match &g.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let s = Settings {
            format: g.format.or(file.format).unwrap_or(Format::Json),
            out: g.out.clone().or(file.out),
            strict: g.strict || file.strict.unwrap_or(false),
            threads: g.threads.or(file.threads),
            rel_tol: g.rel_tol.or(file.rel_tol),
            abs_tol: g.abs_tol.or(file.abs_tol),
            seed: file.seed,
            samples: file.samples,
        };
        for (name, v) in [("rel_tol", s.rel_tol), ("abs_tol", s.abs_tol)] {
            if let Some(t) = v {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Failure::Validation(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if s.threads == Some(0) {
            return Err(Failure::Validation("threads must be at least 1".into()));
        }
        Ok(s)
    }
}

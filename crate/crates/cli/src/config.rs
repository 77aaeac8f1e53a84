//! Run configuration: command-line flags layered over an optional
//! `key=value` file.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use poisson_sums::Exponent;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Config(format!(
                "unknown format {other:?}; expected csv or json"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    All,
    Kernel,
    Decomposition,
    Lemmas,
    Asymptotics,
}

impl Suite {
    pub fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::All => "all",
            Suite::Kernel => "kernel",
            Suite::Decomposition => "decomposition",
            Suite::Lemmas => "lemmas",
            Suite::Asymptotics => "asymptotics",
        }
    }
}

impl FromStr for Suite {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "all" => Ok(Suite::All),
            "kernel" => Ok(Suite::Kernel),
            "decomposition" => Ok(Suite::Decomposition),
            "lemmas" => Ok(Suite::Lemmas),
            "asymptotics" => Ok(Suite::Asymptotics),
            other => Err(CliError::Config(format!(
                "unknown suite {other:?}; expected all, kernel, decomposition, lemmas or asymptotics"
            ))),
        }
    }
}

/// Validated settings shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub alpha: f64,
    pub r: f64,
    pub beta: f64,
    pub p: Exponent,
    pub n_list: Vec<u64>,
    pub eps: f64,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub suite: Suite,
}

/// Unvalidated settings; every field is optional so that sources can be layered.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub alpha: Option<String>,
    pub r: Option<String>,
    pub beta: Option<String>,
    pub p: Option<String>,
    pub n: Option<String>,
    pub eps: Option<String>,
    pub tol: Option<String>,
    pub format: Option<String>,
    pub out: Option<String>,
    pub suite: Option<String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", i + 1)))?;
            let value = Some(value.trim().to_string());
            match key.trim() {
                "alpha" => s.alpha = value,
                "r" => s.r = value,
                "beta" => s.beta = value,
                "p" => s.p = value,
                "n" => s.n = value,
                "eps" => s.eps = value,
                "tol" => s.tol = value,
                "format" => s.format = value,
                "out" => s.out = value,
                "suite" => s.suite = value,
                other => {
                    return Err(CliError::Config(format!(
                        "line {}: unknown key {other:?}",
                        i + 1
                    )))
                }
            }
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Fields set in `over` replace those in `self`.
    pub fn layered(self, over: Settings) -> Settings {
        Settings {
            alpha: over.alpha.or(self.alpha),
            r: over.r.or(self.r),
            beta: over.beta.or(self.beta),
            p: over.p.or(self.p),
            n: over.n.or(self.n),
            eps: over.eps.or(self.eps),
            tol: over.tol.or(self.tol),
            format: over.format.or(self.format),
            out: over.out.or(self.out),
            suite: over.suite.or(self.suite),
        }
    }

    /// Applies defaults and validates.
    pub fn resolve(self) -> Result<RunConfig, CliError> {
        let alpha = number("alpha", self.alpha.as_deref(), 1.0)?;
        let r = number("r", self.r.as_deref(), 0.5)?;
        let beta = number("beta", self.beta.as_deref(), 0.0)?;
        let eps = number("eps", self.eps.as_deref(), 1e-16)?;
        let tol = number("tol", self.tol.as_deref(), 1e-8)?;
        let p = match self.p.as_deref() {
            None => Exponent::ONE,
            Some(v) => v
                .parse::<Exponent>()
                .map_err(|e| CliError::Config(format!("p: {e}")))?,
        };
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CliError::Config(format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        if !(r > 0.0 && r <= 1.0) {
            return Err(CliError::Config(format!("r must lie in (0, 1], got {r}")));
        }
        if !beta.is_finite() {
            return Err(CliError::Config("beta must be finite".into()));
        }
        for (name, v) in [("eps", eps), ("tol", tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Config(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        let n_list = parse_n_list(self.n.as_deref().unwrap_or("1225"))?;
        Ok(RunConfig {
            alpha,
            r,
            beta,
            p,
            n_list,
            eps,
            tol,
            format: self.format.as_deref().unwrap_or("csv").parse()?,
            out: self.out.map(PathBuf::from),
            suite: self.suite.as_deref().unwrap_or("all").parse()?,
        })
    }
}

fn number(name: &str, raw: Option<&str>, default: f64) -> Result<f64, CliError> {
    match raw {
        None => Ok(default),
        Some(v) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| CliError::Config(format!("{name}: cannot parse {v:?} as a number"))),
    }
}

/// `N1,N2,...` or a geometric range `start:stop:factor`.
pub fn parse_n_list(raw: &str) -> Result<Vec<u64>, CliError> {
    let bad = |msg: String| CliError::Config(format!("n: {msg}"));
    let raw = raw.trim();
    let list: Vec<u64> = if raw.contains(':') {
        let parts: Vec<&str> = raw.split(':').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad("geometric range must read start:stop:factor".into()));
        }
        let start: u64 = parts[0]
            .parse()
            .map_err(|_| bad(format!("bad start {:?}", parts[0])))?;
        let stop: u64 = parts[1]
            .parse()
            .map_err(|_| bad(format!("bad stop {:?}", parts[1])))?;
        let factor: f64 = parts[2]
            .parse()
            .map_err(|_| bad(format!("bad factor {:?}", parts[2])))?;
        if !(factor > 1.0) || start == 0 || stop < start {
            return Err(bad("need 1 ≤ start ≤ stop and factor > 1".into()));
        }
        let mut out = Vec::new();
        let mut x = start as f64;
        while x.round() <= stop as f64 {
            let v = x.round() as u64;
            if out.last() != Some(&v) {
                out.push(v);
            }
            x *= factor;
        }
        out
    } else {
        raw.split(',')
            .map(|s| {
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| bad(format!("cannot parse {s:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if list.is_empty() {
        return Err(bad("list is empty".into()));
    }
    if list[0] == 0 {
        return Err(bad("values must be at least 1".into()));
    }
    if list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(bad("values must be strictly ascending".into()));
    }
    Ok(list)
}

//! Run configuration: JSON config files, command-line overrides and validation.
//!
//! Both sources deserialize into [`RawConfig`]; flags override file values key
//! by key, and [`RawConfig::finish`] applies defaults and rejects anything that
//! does not name a known suite, family, parameter or tolerance.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use roundsphere_core::families::{Family, FAMILY_NAMES};
use roundsphere_core::rigidity::MIN_GRID;
use roundsphere_core::Tolerances;
use serde::Deserialize;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("config parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("invalid value for `{key}`: {msg}")]
    Invalid { key: &'static str, msg: String },
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

fn invalid(key: &'static str, msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, msg: msg.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Symfun,
    Cones,
    Spaceform,
    Walter,
    Rigidity,
    All,
}

impl Suite {
    pub const NAMES: &'static [&'static str] = &["symfun", "cones", "spaceform", "walter", "rigidity", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Symfun => "symfun",
            Suite::Cones => "cones",
            Suite::Spaceform => "spaceform",
            Suite::Walter => "walter",
            Suite::Rigidity => "rigidity",
            Suite::All => "all",
        }
    }

    fn uses_family(self) -> bool {
        matches!(self, Suite::Walter | Suite::Rigidity | Suite::All)
    }
}

impl FromStr for Suite {
    type Err = ConfigError;
    fn from_str(s: &str) -> Result<Self, ConfigError> {
        Ok(match s {
            "symfun" => Suite::Symfun,
            "cones" => Suite::Cones,
            "spaceform" => Suite::Spaceform,
            "walter" => Suite::Walter,
            "rigidity" => Suite::Rigidity,
            "all" => Suite::All,
            _ => return Err(invalid("suite", format!("unknown suite {s:?}; available: {}", Suite::NAMES.join(", ")))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    JsonCsv,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::JsonCsv => "json+csv",
        }
    }
}

/// Every key a config file may contain. All fields are optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    pub suite: Option<String>,
    pub family: Option<String>,
    pub params: Option<BTreeMap<String, f64>>,
    pub c: Option<f64>,
    pub r: Option<i64>,
    pub grid: Option<Vec<i64>>,
    pub seed: Option<u64>,
    pub samples: Option<i64>,
    pub tol: Option<BTreeMap<String, f64>>,
    pub out: Option<PathBuf>,
    pub format: Option<String>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub suite: Suite,
    pub family_name: String,
    pub params: Vec<(String, f64)>,
    pub family: Family,
    pub c: f64,
    pub r: usize,
    pub grid: Vec<usize>,
    pub seed: u64,
    /// Random instances per randomized check.
    pub samples: usize,
    /// Tolerance overrides exactly as given.
    pub tol_overrides: Vec<(String, f64)>,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_SAMPLES: usize = 2000;

/// Default grid resolution for an `n`-dimensional chart.
pub fn default_grid(n: usize) -> Vec<usize> {
    let res = match n {
        2 => 16,
        3 => 10,
        _ => MIN_GRID,
    };
    vec![res; n]
}

impl RawConfig {
    /// Values set in `over` replace those in `self`; maps are merged key by key.
    pub fn overlay(mut self, over: RawConfig) -> RawConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if over.$f.is_some() { self.$f = over.$f; } )* };
        }
        take!(suite, family, c, r, grid, seed, samples, out, format);
        for (mine, theirs) in [(&mut self.params, over.params), (&mut self.tol, over.tol)] {
            if let Some(t) = theirs {
                mine.get_or_insert_with(BTreeMap::new).extend(t);
            }
        }
        self
    }

    pub fn finish(self) -> Result<RunConfig, ConfigError> {
        let suite: Suite = self.suite.as_deref().unwrap_or("all").parse()?;
        let family_name = self.family.unwrap_or_else(|| "sphere".to_string());
        if !FAMILY_NAMES.contains(&family_name.as_str()) {
            return Err(invalid("family", format!("unknown family {family_name:?}; available: {}", FAMILY_NAMES.join(", "))));
        }
        let c = self.c.unwrap_or(0.0);
        if !c.is_finite() {
            return Err(invalid("c", "must be finite"));
        }
        let params: Vec<(String, f64)> = self.params.unwrap_or_default().into_iter().collect();
        let family = Family::from_params(&family_name, &params, c).map_err(|e| invalid("params", e.to_string()))?;
        family.check_model(c).map_err(|e| invalid("family", e.to_string()))?;
        let n = family.dim();

        let r = self.r.unwrap_or(2);
        let lo = if matches!(suite, Suite::Rigidity | Suite::All) { 2 } else { 1 };
        if r < lo || r > n as i64 {
            return Err(invalid("r", format!("r = {r} must lie in {lo}..={n} for suite {suite} on an {n}-dimensional family")));
        }

        let grid = match self.grid {
            None => default_grid(n),
            Some(g) => {
                if let Some(bad) = g.iter().find(|&&v| v < MIN_GRID as i64) {
                    return Err(invalid("grid", format!("resolution {bad} must be an integer of at least {MIN_GRID}")));
                }
                if g.len() != n {
                    return Err(invalid("grid", format!("{} resolutions given, the family has {n} chart axes", g.len())));
                }
                g.into_iter().map(|v| v as usize).collect()
            }
        };
        if suite.uses_family() && family.domain().iter().any(|(a, b)| !(a.is_finite() && b.is_finite())) {
            return Err(invalid("family", format!("{family_name} with these parameters is unbounded; scans need a compact chart")));
        }

        let samples = match self.samples {
            None => DEFAULT_SAMPLES,
            Some(s) if s >= 1 => s as usize,
            Some(s) => return Err(invalid("samples", format!("{s} must be at least 1"))),
        };

        let mut tolerances = Tolerances::default();
        let tol_overrides: Vec<(String, f64)> = self.tol.unwrap_or_default().into_iter().collect();
        for (k, v) in &tol_overrides {
            tolerances.set(k, *v).map_err(|_| {
                if Tolerances::NAMES.contains(&k.as_str()) {
                    invalid("tol", format!("{k} = {v} must be a finite non-negative number"))
                } else {
                    invalid("tol", format!("unknown tolerance {k:?}; available: {}", Tolerances::NAMES.join(", ")))
                }
            })?;
        }

        let format = match self.format.as_deref().unwrap_or("json") {
            "json" => Format::Json,
            "json+csv" => Format::JsonCsv,
            other => return Err(invalid("format", format!("unknown format {other:?}; available: json, json+csv"))),
        };
        if format == Format::JsonCsv && self.out.is_none() {
            return Err(invalid("format", "json+csv needs an --out path"));
        }

        Ok(RunConfig {
            suite,
            family_name,
            params,
            family,
            c,
            r: r as usize,
            grid,
            seed: self.seed.unwrap_or(0),
            samples,
            tol_overrides,
            tolerances,
            out: self.out,
            format,
        })
    }
}

/// Parses JSON config text; an empty document yields the defaults.
pub fn parse_raw(text: &str) -> Result<RawConfig, ConfigError> {
    if text.trim().is_empty() {
        return Ok(RawConfig::default());
    }
    serde_json::from_str(text).map_err(|e| ConfigError::Parse { line: e.line(), column: e.column(), msg: e.to_string() })
}

/// Parses and validates a JSON config document.
pub fn validate_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_raw(text)?.finish()
}

/// Parses `k=v,k=v` into a map of numbers.
pub fn parse_pairs(key: &'static str, text: &str) -> Result<BTreeMap<String, f64>, ConfigError> {
    let mut out = BTreeMap::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| invalid(key, format!("expected k=v, got {item:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| invalid(key, format!("{:?} is not a number", v.trim())))?;
        out.insert(k.trim().to_string(), v);
    }
    Ok(out)
}

/// Parses a comma-separated grid such as `16,16`.
pub fn parse_grid(text: &str) -> Result<Vec<i64>, ConfigError> {
    text.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|_| invalid("grid", format!("{:?} is not an integer", s.trim()))))
        .collect()
}

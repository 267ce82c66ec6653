//! `key = value` configuration files and flag overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use sumprod_core::is_prime;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected key = value")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value for `{key}`: {value}")]
    BadValue { key: String, value: String },
    #[error("{0} is not a prime >= 5")]
    NotPrime(u64),
    #[error("empty grid for `{0}`")]
    EmptyGrid(&'static str),
    #[error("`{key}` must be {rule}")]
    OutOfRange { key: &'static str, rule: &'static str },
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

/// Validated parameters. Grids not used by an experiment are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub primes: Vec<u64>,
    pub m: Vec<u64>,
    pub n: Vec<u32>,
    pub beta: Vec<f64>,
    pub rho: Vec<u32>,
    pub alpha: Vec<f64>,
    pub q: Vec<u64>,
    pub depth_cap: u32,
    pub k_max: u32,
    pub samples: usize,
    pub q_max: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            experiment: String::new(),
            primes: vec![101],
            m: vec![2],
            n: vec![5],
            beta: vec![0.5],
            rho: vec![1],
            alpha: vec![0.5],
            q: vec![100],
            depth_cap: 8,
            k_max: 10,
            samples: 100,
            q_max: 10_000,
            out: None,
            format: Format::Csv,
            seed: 0,
            threads: None,
        }
    }
}

pub const KEYS: &[&str] = &[
    "experiment",
    "p",
    "p_range",
    "M",
    "N",
    "beta",
    "rho",
    "alpha",
    "q",
    "depth_cap",
    "k_max",
    "samples",
    "q_max",
    "out",
    "format",
    "seed",
    "threads",
];

/// Raw settings; later inserts override earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings(BTreeMap<String, String>);

impl Settings {
    pub fn parse_text(text: &str) -> Result<Self, ConfigError> {
        let mut s = Settings::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
            s.set(k.trim(), v.trim())?;
        }
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        })?;
        Self::parse_text(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        // p and p_range describe the same grid
        match key {
            "p" => {
                self.0.remove("p_range");
            }
            "p_range" => {
                self.0.remove("p");
            }
            _ => {}
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.0 {
            self.set(k, v).expect("keys already validated");
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn build(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut c = ExperimentConfig::default();
        if let Some(v) = self.get("experiment") {
            c.experiment = v.to_string();
        }
        if let Some(v) = self.get("p") {
            c.primes = parse_list(v, "p")?;
        }
        if let Some(v) = self.get("p_range") {
            c.primes = parse_prime_range(v)?;
        }
        if let Some(v) = self.get("M") {
            c.m = parse_list(v, "M")?;
        }
        if let Some(v) = self.get("N") {
            c.n = parse_list(v, "N")?;
        }
        if let Some(v) = self.get("beta") {
            c.beta = parse_list(v, "beta")?;
        }
        if let Some(v) = self.get("rho") {
            c.rho = parse_list(v, "rho")?;
        }
        if let Some(v) = self.get("alpha") {
            c.alpha = parse_list(v, "alpha")?;
        }
        if let Some(v) = self.get("q") {
            c.q = parse_list(v, "q")?;
        }
        if let Some(v) = self.get("depth_cap") {
            c.depth_cap = parse_one(v, "depth_cap")?;
        }
        if let Some(v) = self.get("k_max") {
            c.k_max = parse_one(v, "k_max")?;
        }
        if let Some(v) = self.get("samples") {
            c.samples = parse_one(v, "samples")?;
        }
        if let Some(v) = self.get("q_max") {
            c.q_max = parse_one(v, "q_max")?;
        }
        if let Some(v) = self.get("out") {
            c.out = Some(PathBuf::from(v));
        }
        if let Some(v) = self.get("format") {
            c.format = parse_one(v, "format")?;
        }
        if let Some(v) = self.get("seed") {
            c.seed = parse_one(v, "seed")?;
        }
        if let Some(v) = self.get("threads") {
            c.threads = Some(parse_one(v, "threads")?);
        }
        c.validate()?;
        Ok(c)
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.primes.is_empty() {
            return Err(ConfigError::EmptyGrid("p"));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| p < 5 || !is_prime(p)) {
            return Err(ConfigError::NotPrime(p));
        }
        for (name, empty) in [
            ("M", self.m.is_empty()),
            ("N", self.n.is_empty()),
            ("beta", self.beta.is_empty()),
            ("rho", self.rho.is_empty()),
            ("alpha", self.alpha.is_empty()),
            ("q", self.q.is_empty()),
        ] {
            if empty {
                return Err(ConfigError::EmptyGrid(name));
            }
        }
        if self.m.contains(&0) {
            return Err(ConfigError::OutOfRange {
                key: "M", rule: "≥ 1"
            });
        }
        if self.n.contains(&0) {
            return Err(ConfigError::OutOfRange {
                key: "N", rule: "≥ 1"
            });
        }
        if self.beta.iter().any(|&b| !(b > 0.0 && b <= 0.5)) {
            return Err(ConfigError::OutOfRange {
                key: "beta",
                rule: "in (0, 1/2]",
            });
        }
        if self.alpha.iter().any(|&a| !(a > 0.0 && a < 1.0)) {
            return Err(ConfigError::OutOfRange {
                key: "alpha",
                rule: "in (0, 1)",
            });
        }
        if self.threads == Some(0) {
            return Err(ConfigError::OutOfRange {
                key: "threads",
                rule: "≥ 1",
            });
        }
        Ok(())
    }
}

fn parse_one<T: std::str::FromStr>(v: &str, key: &str) -> Result<T, ConfigError> {
    v.trim().parse().map_err(|_| ConfigError::BadValue {
        key: key.to_string(),
        value: v.to_string(),
    })
}

/// Comma-separated values; `a..b` expands integer ranges inclusively.
fn parse_list<T: std::str::FromStr>(v: &str, key: &str) -> Result<Vec<T>, ConfigError> {
    let mut out = Vec::new();
    for part in v.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: u64 = parse_one(a, key)?;
            let b: u64 = parse_one(b, key)?;
            for x in a..=b {
                out.push(parse_one(&x.to_string(), key)?);
            }
        } else {
            out.push(parse_one(part, key)?);
        }
    }
    Ok(out)
}

/// `a..b` or `a..b:step`, keeping only primes ≥ 5.
pub fn parse_prime_range(v: &str) -> Result<Vec<u64>, ConfigError> {
    let bad = || ConfigError::BadValue {
        key: "p_range".into(),
        value: v.to_string(),
    };
    let (range, step) = match v.split_once(':') {
        Some((r, s)) => (r, s.trim().parse::<u64>().map_err(|_| bad())?),
        None => (v, 1),
    };
    let (a, b) = range.split_once("..").ok_or_else(bad)?;
    let a: u64 = a.trim().parse().map_err(|_| bad())?;
    let b: u64 = b.trim().parse().map_err(|_| bad())?;
    if step == 0 || a > b {
        return Err(bad());
    }
    Ok((a..=b)
        .step_by(step as usize)
        .filter(|&p| p >= 5 && is_prime(p))
        .collect())
}

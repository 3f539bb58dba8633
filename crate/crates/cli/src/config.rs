//! Run configuration: flags over a flat TOML file over defaults.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

/// Keys that never influence results and are left out of the config hash.
const UNHASHED: [&str; 2] = ["threads", "output"];

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Core(lsign::Error),
    Io(std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(e) => e.exit_code(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<lsign::Error> for CliError {
    fn from(e: lsign::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn config_err<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Config(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Resolved settings for one command.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    values: BTreeMap<String, String>,
}

impl RunConfig {
    /// Layers `flags` over the config file over `defaults`, rejecting keys
    /// that `allowed` does not list.
    pub fn resolve(
        command: &str,
        allowed: &[&str],
        defaults: &[(&str, &str)],
        file: Option<&Path>,
        flags: Vec<(&str, Option<String>)>,
    ) -> CliResult<Self> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        if let Some(path) = file {
            for (k, v) in read_config_file(path)? {
                if !allowed.contains(&k.as_str()) {
                    return config_err(format!("`{k}` is not a setting of `{command}`"));
                }
                values.insert(k, v);
            }
        }
        for (k, v) in flags {
            if let Some(v) = v {
                values.insert(k.to_string(), v);
            }
        }
        Ok(RunConfig { command: command.to_string(), values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> CliResult<&str> {
        self.get(key)
            .ok_or_else(|| CliError::Config(format!("`{}` needs --{key}", self.command)))
    }

    pub fn format(&self) -> CliResult<Format> {
        match self.get("format").unwrap_or("json") {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => config_err(format!("unknown format `{other}` (csv or json)")),
        }
    }

    pub fn output(&self) -> Option<PathBuf> {
        self.get("output").map(PathBuf::from)
    }

    pub fn threads(&self) -> CliResult<Option<usize>> {
        match self.get("threads") {
            None => Ok(None),
            Some(s) => match parse_count(s)? {
                0 => config_err("threads must be at least 1"),
                n => Ok(Some(n as usize)),
            },
        }
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None | Some("false") => Ok(false),
            Some("true") => Ok(true),
            Some(other) => config_err(format!("`{key}` must be true or false, got `{other}`")),
        }
    }

    /// Settings that determine the output, in key order.
    pub fn hashed_entries(&self) -> Vec<(&str, &str)> {
        self.values
            .iter()
            .filter(|(k, _)| !UNHASHED.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }

    /// SHA-256 over the command and the hashed settings.
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        for (k, v) in self.hashed_entries() {
            h.update(b"\n");
            h.update(k.as_bytes());
            h.update(b"=");
            h.update(v.as_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn read_config_file(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    table
        .into_iter()
        .map(|(k, v)| Ok((k.clone(), scalar(&k, &v)?)))
        .collect()
}

fn scalar(key: &str, v: &toml::Value) -> CliResult<String> {
    match v {
        toml::Value::String(s) => Ok(s.clone()),
        toml::Value::Integer(i) => Ok(i.to_string()),
        toml::Value::Float(f) => Ok(f.to_string()),
        toml::Value::Boolean(b) => Ok(b.to_string()),
        toml::Value::Array(items) => items
            .iter()
            .map(|i| scalar(key, i))
            .collect::<CliResult<Vec<_>>>()
            .map(|parts| parts.join(",")),
        _ => config_err(format!("`{key}` must be a string, number, boolean or list")),
    }
}

/// Parses `1000000`, `1e6` or `10^6` as a positive real.
pub fn parse_real(s: &str) -> CliResult<f64> {
    let s = s.trim();
    let v = if let Some((b, e)) = s.split_once('^') {
        match (b.trim().parse::<f64>(), e.trim().parse::<f64>()) {
            (Ok(b), Ok(e)) => b.powf(e),
            _ => return config_err(format!("bad number `{s}`")),
        }
    } else {
        s.parse::<f64>().map_err(|_| CliError::Config(format!("bad number `{s}`")))?
    };
    if !v.is_finite() {
        return config_err(format!("`{s}` is not finite"));
    }
    Ok(v)
}

/// A non-negative integer in any form [`parse_real`] accepts.
pub fn parse_count(s: &str) -> CliResult<u64> {
    let v = parse_real(s)?;
    if v < 0.0 || v.fract() != 0.0 || v >= u64::MAX as f64 {
        return config_err(format!("`{s}` is not a non-negative integer"));
    }
    Ok(v as u64)
}

/// A grid of reals: a comma list, or `a..b` for the decades `a, 10a, …`
/// up to `b`, or `a..b:n` for `n` geometrically spaced points.
pub fn parse_grid(s: &str) -> CliResult<Vec<f64>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let Some((lo, rest)) = part.split_once("..") else {
            out.push(parse_real(part)?);
            continue;
        };
        let (hi, count) = match rest.split_once(':') {
            Some((hi, n)) => (hi, Some(parse_count(n)?)),
            None => (rest, None),
        };
        let (lo, hi) = (parse_real(lo)?, parse_real(hi)?);
        if !(lo > 0.0 && hi >= lo) {
            return config_err(format!("range `{part}` needs 0 < a ≤ b"));
        }
        match count {
            Some(n) if n >= 2 => {
                let step = (hi / lo).ln() / (n - 1) as f64;
                out.extend((0..n).map(|i| {
                    if i == n - 1 { hi } else { lo * (step * i as f64).exp() }
                }));
            }
            Some(_) => return config_err(format!("range `{part}` needs at least 2 points")),
            None => {
                let mut v = lo;
                let mut k = 0;
                while v <= hi * (1.0 + 1e-12) {
                    out.push(v);
                    k += 1;
                    v = lo * 10f64.powi(k);
                }
            }
        }
    }
    if out.is_empty() {
        return config_err("empty grid");
    }
    if out.windows(2).any(|w| w[1] <= w[0]) {
        return config_err(format!("grid `{s}` must be strictly increasing"));
    }
    Ok(out)
}

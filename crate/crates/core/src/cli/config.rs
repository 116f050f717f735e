//! `key = value` experiment files and typed access to the merged parameters.

use std::collections::BTreeMap;
use std::fmt;

use sha2::{Digest, Sha256};

use crate::space::EpsilonGrid;

/// A usage problem: bad flag, unknown key, unparsable value.
#[derive(Debug, Clone, PartialEq)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub(crate) fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

/// One `key = value` line of a config file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigLine {
    pub line: usize,
    pub key: String,
    pub value: String,
}

/// Keys are case-sensitive; `_` and `-` are interchangeable.
pub fn normalize_key(key: &str) -> String {
    key.trim().replace('_', "-")
}

/// Parses a config file. Blank lines and `#` comments are skipped.
pub fn parse_config(text: &str) -> Result<Vec<ConfigLine>, UsageError> {
    let mut out: Vec<ConfigLine> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = normalize_key(key);
        if key.is_empty() {
            return Err(usage(format!("config line {}: empty key", i + 1)));
        }
        if let Some(prev) = out.iter().find(|c| c.key == key) {
            return Err(usage(format!(
                "config line {}: key {key:?} already set on line {}",
                i + 1,
                prev.line
            )));
        }
        out.push(ConfigLine {
            line: i + 1,
            key,
            value: value.trim().to_string(),
        });
    }
    Ok(out)
}

/// Effective parameters of one run, after defaults, file and flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Params {
    values: BTreeMap<String, String>,
}

impl Params {
    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn remove(&mut self, key: &str) {
        self.values.remove(key);
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn str(&self, key: &str) -> Result<&str, UsageError> {
        self.raw(key)
            .ok_or_else(|| usage(format!("missing parameter {key}")))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str, what: &str) -> Result<T, UsageError> {
        let v = self.str(key)?;
        v.parse()
            .map_err(|_| usage(format!("parameter {key}: expected {what}, got {v:?}")))
    }

    pub fn usize(&self, key: &str) -> Result<usize, UsageError> {
        self.parsed(key, "a nonnegative integer")
    }

    pub fn u32(&self, key: &str) -> Result<u32, UsageError> {
        self.parsed(key, "a nonnegative integer")
    }

    pub fn f64(&self, key: &str) -> Result<f64, UsageError> {
        number(self.str(key)?).map_err(|e| usage(format!("parameter {key}: {}", e.0)))
    }

    pub fn opt_f64(&self, key: &str) -> Result<Option<f64>, UsageError> {
        self.contains(key).then(|| self.f64(key)).transpose()
    }

    pub fn bool(&self, key: &str) -> Result<bool, UsageError> {
        match self.raw(key) {
            None => Ok(false),
            Some("true" | "1" | "yes") => Ok(true),
            Some("false" | "0" | "no") => Ok(false),
            Some(v) => Err(usage(format!(
                "parameter {key}: expected true or false, got {v:?}"
            ))),
        }
    }

    /// Comma list of integers and inclusive ranges `a..b`.
    pub fn usize_list(&self, key: &str) -> Result<Vec<usize>, UsageError> {
        let v = self.str(key)?;
        let bad = || {
            usage(format!(
                "parameter {key}: expected integers or ranges a..b, got {v:?}"
            ))
        };
        let mut out = Vec::new();
        for item in v.split(',').map(str::trim) {
            match item.split_once("..") {
                Some((a, b)) => {
                    let a: usize = a.trim().parse().map_err(|_| bad())?;
                    let b: usize = b.trim().parse().map_err(|_| bad())?;
                    if a > b {
                        return Err(bad());
                    }
                    out.extend(a..=b);
                }
                None => out.push(item.parse().map_err(|_| bad())?),
            }
        }
        Ok(out)
    }

    /// Comma list of numbers (`0.25`, `1/4`, `2^-2`).
    pub fn f64_list(&self, key: &str) -> Result<Vec<f64>, UsageError> {
        let v = self.str(key)?;
        v.split(',')
            .map(|s| number(s).map_err(|e| usage(format!("parameter {key}: {}", e.0))))
            .collect()
    }

    /// Radii as a comma list, or a dyadic range `2^-a..2^-b`.
    pub fn eps_grid(&self, key: &str) -> Result<EpsilonGrid, UsageError> {
        let v = self.str(key)?;
        let values = match v.split_once("..") {
            Some((a, b)) => {
                let exp = |s: &str| {
                    s.trim()
                        .strip_prefix("2^-")
                        .and_then(|e| e.parse::<u32>().ok())
                        .ok_or_else(|| {
                            usage(format!(
                                "parameter {key}: ranges must read 2^-a..2^-b, got {v:?}"
                            ))
                        })
                };
                let (a, b) = (exp(a)?, exp(b)?);
                if a > b {
                    return Err(usage(format!("parameter {key}: empty range {v:?}")));
                }
                (a..=b).map(|k| 2f64.powi(-(k as i32))).collect()
            }
            None => self.f64_list(key)?,
        };
        EpsilonGrid::new(values).map_err(|e| usage(format!("parameter {key}: {e}")))
    }

    /// Hex SHA-256 of the canonical `key=value` lines.
    pub fn hash(&self, command: &str, seed: Option<u64>) -> String {
        let mut h = Sha256::new();
        h.update(format!("command={command}\n"));
        if let Some(s) = seed {
            h.update(format!("seed={s}\n"));
        }
        for (k, v) in &self.values {
            h.update(format!("{k}={v}\n"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Decimal, fraction `a/b` or power `2^-k`.
pub fn number(s: &str) -> Result<f64, UsageError> {
    let s = s.trim();
    let bad = || usage(format!("cannot parse number {s:?}"));
    if let Some(e) = s.strip_prefix("2^") {
        let e: i32 = e.parse().map_err(|_| bad())?;
        return Ok(2f64.powi(e));
    }
    if let Some((a, b)) = s.split_once('/') {
        let a: f64 = a.trim().parse().map_err(|_| bad())?;
        let b: f64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0.0 {
            return Err(bad());
        }
        return Ok(a / b);
    }
    s.parse().map_err(|_| bad())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_blank_lines() {
        let c = parse_config("# run\n\nn = 100 # windows\neps_list=2^-1..2^-3\n").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(
            (c[0].line, c[0].key.as_str(), c[0].value.as_str()),
            (3, "n", "100")
        );
        assert_eq!(c[1].key, "eps-list");
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_config("n 100").unwrap_err().0.contains("line 1"));
        assert!(parse_config("n = 1\nn = 2")
            .unwrap_err()
            .0
            .contains("line 2"));
        assert!(parse_config(" = 2").is_err());
    }

    #[test]
    fn typed_values() {
        let mut p = Params::default();
        p.set("m", "1..3,7");
        p.set("eps", "2^-1..2^-3");
        p.set("pi", "1/2, 1/4,0.25");
        p.set("flag", "yes");
        assert_eq!(p.usize_list("m").unwrap(), vec![1, 2, 3, 7]);
        assert_eq!(p.eps_grid("eps").unwrap().values(), &[0.5, 0.25, 0.125]);
        assert_eq!(p.f64_list("pi").unwrap(), vec![0.5, 0.25, 0.25]);
        assert!(p.bool("flag").unwrap());
        assert!(!p.bool("absent").unwrap());
        assert!(p.usize("m").is_err());
        p.set("m", "3..1");
        assert!(p.usize_list("m").is_err());
    }

    #[test]
    fn hash_depends_on_every_value() {
        let mut p = Params::default();
        p.set("n", "10");
        let a = p.hash("corrsum", Some(1));
        assert_eq!(a.len(), 64);
        assert_ne!(a, p.hash("corrsum", Some(2)));
        assert_ne!(a, p.hash("entropy", Some(1)));
        p.set("n", "11");
        assert_ne!(a, p.hash("corrsum", Some(1)));
    }
}

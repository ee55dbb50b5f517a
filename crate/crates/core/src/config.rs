//! Flat `key = value` run configuration.
//!
//! Blank lines and text after `#` are ignored. Keys are case-insensitive and
//! `-` is treated as `_`, so `max-iter` and `max_iter` are the same key.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn norm_key(k: &str) -> String {
    k.trim().to_ascii_lowercase().replace('-', "_")
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = Config::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", no + 1)))?;
            if k.trim().is_empty() {
                return Err(Error::Config(format!("line {}: empty key", no + 1)));
            }
            c.set(k, v.trim());
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(norm_key(key), value.into());
    }

    /// Copies every entry of `other` over this one.
    pub fn merge(&mut self, other: &Config) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(&norm_key(key)).map(String::as_str)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::Config(format!("{key} = {v}: {e}")))
            })
            .transpose()
    }

    pub fn get_or<T>(&self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T>(&self, key: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.get(key)?
            .ok_or_else(|| Error::Config(format!("missing required key '{key}'")))
    }

    /// Comma-separated list; empty when the key is absent.
    pub fn list<T>(&self, key: &str, sep: char) -> Result<Vec<T>>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(v) => v
                .split(sep)
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.parse::<T>()
                        .map_err(|e| Error::Config(format!("{key}: '{s}': {e}")))
                })
                .collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.entries {
            writeln!(f, "{k} = {v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_normalises_keys() {
        let c = Config::parse("# header\nparams = 0.9,0.7,-2,1.16  # O and a WQA\n\nMax-Iter=5000\n").unwrap();
        assert_eq!(c.raw("params"), Some("0.9,0.7,-2,1.16"));
        assert_eq!(c.get::<usize>("max_iter").unwrap(), Some(5000));
        assert_eq!(c.get::<usize>("transient").unwrap(), None);
        assert_eq!(c.get_or("transient", 7usize).unwrap(), 7);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(matches!(Config::parse("params 1,2"), Err(Error::Config(_))));
        assert!(Config::parse(" = 3").is_err());
        let c = Config::parse("res = abc").unwrap();
        assert!(c.get::<usize>("res").is_err());
        assert!(c.require::<usize>("nope").is_err());
    }

    #[test]
    fn later_entries_override() {
        let mut a = Config::parse("out = a\nres = 10").unwrap();
        let b = Config::parse("out = b").unwrap();
        a.merge(&b);
        assert_eq!(a.raw("out"), Some("b"));
        assert_eq!(a.raw("res"), Some("10"));
        assert_eq!(Config::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn lists() {
        let c = Config::parse("n = 1, 2,3").unwrap();
        assert_eq!(c.list::<u32>("n", ',').unwrap(), vec![1, 2, 3]);
        assert!(c.list::<u32>("missing", ',').unwrap().is_empty());
    }
}

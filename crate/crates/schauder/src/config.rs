//! Flat `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are ignored. Keys use the long
//! flag names without dashes (`eta`, `eps`, `ensemble`, ...).

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
    origin: String,
}

impl Config {
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::parse(origin, n + 1, format!("expected key = value, found {line:?}")))?;
            let key = k.trim().replace('_', "-");
            if key.is_empty() {
                return Err(Error::parse(origin, n + 1, "empty key"));
            }
            if entries.insert(key.clone(), v.trim().to_string()).is_some() {
                return Err(Error::parse(origin, n + 1, format!("duplicate key {key}")));
            }
        }
        Ok(Config { entries, origin: origin.display().to_string() })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
        Config::parse(&text, path)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| Error::Validation(format!("{}: cannot parse {key} = {v:?}", self.origin))),
        }
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => parse_list(v)
                .map(Some)
                .map_err(|_| Error::Validation(format!("{}: cannot parse {key} = {v:?}", self.origin))),
        }
    }

    /// Keys not in `known`, for rejecting typos.
    pub fn unknown_keys<'a>(&'a self, known: &[&str]) -> Vec<&'a str> {
        self.entries.keys().map(String::as_str).filter(|k| !known.contains(k)).collect()
    }
}

pub fn parse_list<T: FromStr>(s: &str) -> std::result::Result<Vec<T>, T::Err> {
    s.split(',').map(|p| p.trim().parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects() {
        let c = Config::parse("# run\neta = 1.5\neps=1, 0.5\n\nallow_integer = true\n", Path::new("c")).unwrap();
        assert_eq!(c.get::<f64>("eta").unwrap(), Some(1.5));
        assert_eq!(c.list::<f64>("eps").unwrap(), Some(vec![1.0, 0.5]));
        assert_eq!(c.get::<bool>("allow-integer").unwrap(), Some(true));
        assert_eq!(c.get::<u64>("seed").unwrap(), None);
        assert!(c.get::<u64>("eta").is_err());
        assert_eq!(c.unknown_keys(&["eta", "eps"]), vec!["allow-integer"]);
        assert!(Config::parse("eta 1.5", Path::new("c")).is_err());
        assert!(Config::parse("a=1\na=2", Path::new("c")).is_err());
    }
}

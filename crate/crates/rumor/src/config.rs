//! `key = value` configuration files.
//!
//! Blank lines and lines starting with `#` are skipped. Keys may appear
//! once. Values run to the end of the line with surrounding whitespace
//! removed.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    used: RefCell<BTreeSet<String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let l = raw.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            let (k, v) = l.split_once('=').ok_or_else(|| Error::Config {
                line,
                msg: format!("expected `key = value`, found `{l}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() {
                return Err(Error::Config {
                    line,
                    msg: "empty key".into(),
                });
            }
            if let Some((_, first)) = entries.insert(k.to_string(), (v.to_string(), line)) {
                return Err(Error::Config {
                    line,
                    msg: format!("`{k}` already set on line {first}"),
                });
            }
        }
        Ok(Config {
            entries,
            used: RefCell::default(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Builds a config from pairs, as if each were a line.
    pub fn from_pairs<K: Into<String>, V: Into<String>>(
        pairs: impl IntoIterator<Item = (K, V)>,
    ) -> Self {
        let entries = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (k, v))| (k.into(), (v.into(), i + 1)))
            .collect();
        Config {
            entries,
            used: RefCell::default(),
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.entries.insert(key.to_string(), (value.into(), 0));
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.used.borrow_mut().insert(key.to_string());
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    pub fn str(&self, key: &str) -> Result<&str> {
        self.raw(key).ok_or_else(|| Error::MissingKey(key.into()))
    }

    fn convert<T: FromStr>(&self, key: &str, v: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        v.parse::<T>().map_err(|e| {
            let at = self.entries.get(key).map_or(0, |(_, l)| *l);
            let msg = format!("`{v}`: {e}");
            if at > 0 {
                Error::Config {
                    line: at,
                    msg: format!("{key}: {msg}"),
                }
            } else {
                Error::BadValue {
                    key: key.into(),
                    msg,
                }
            }
        })
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let v = self.str(key)?;
        self.convert(key, v)
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        match self.raw(key) {
            Some(v) => self.convert(key, v),
            None => Ok(default),
        }
    }

    pub fn get_opt<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key).map(|v| self.convert(key, v)).transpose()
    }

    /// Comma-separated list.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.str(key)?
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| self.convert(key, s))
            .collect()
    }

    /// Keys that were never read.
    pub fn unused(&self) -> Vec<String> {
        let used = self.used.borrow();
        self.entries
            .keys()
            .filter(|k| !used.contains(*k))
            .cloned()
            .collect()
    }

    /// Fails on keys that were never read, naming the first one.
    pub fn reject_unused(&self) -> Result<()> {
        match self.unused().first() {
            None => Ok(()),
            Some(k) => Err(Error::Config {
                line: self.entries[k].1,
                msg: format!("unknown key `{k}`"),
            }),
        }
    }

    /// `key=value` pairs in key order, for echoing into output headers.
    pub fn pairs(&self) -> Vec<(String, String)> {
        self.entries
            .iter()
            .map(|(k, (v, _))| (k.clone(), v.clone()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_converts() {
        let c = Config::parse("# header\n\nfamily = line\nsizes = 100, 400\ntrials=5\n").unwrap();
        assert_eq!(c.str("family").unwrap(), "line");
        assert_eq!(c.list::<usize>("sizes").unwrap(), [100, 400]);
        assert_eq!(c.get::<u32>("trials").unwrap(), 5);
        assert_eq!(c.get_or("workers", 3usize).unwrap(), 3);
        assert!(c.unused().is_empty());
    }

    #[test]
    fn errors_name_lines_and_keys() {
        let e = Config::parse("a = 1\nbroken\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let e = Config::parse("a = 1\na = 2\n").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }));
        let c = Config::parse("x = 1\ntrials = many\n").unwrap();
        let e = c.get::<usize>("seed").unwrap_err();
        assert_eq!(e.to_string(), "missing config key `seed`");
        let e = c.get::<usize>("trials").unwrap_err();
        assert!(matches!(e, Error::Config { line: 2, .. }), "{e}");
        let e = c.reject_unused().unwrap_err();
        assert!(e.to_string().contains("`x`"));
    }
}

//! Optional flat JSON config file mirroring the command-line flags. Flags
//! given on the command line win.

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};
use std::path::Path;

/// Keys accepted in a config file (flag names, `-` or `_` separated).
const KEYS: &[&str] = &[
    "t",
    "tol",
    "json",
    "a_grid",
    "b_grid",
    "out",
    "jobs",
    "rho",
    "copies",
    "theta",
    "resolution",
    "format",
    "suite",
    "grid",
];

#[derive(Debug, Default, Clone)]
pub struct Config(Map<String, Value>);

impl Config {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let Value::Object(raw) = serde_json::from_str(text)? else {
            bail!("config must be a flat JSON object");
        };
        let mut map = Map::new();
        for (k, v) in raw {
            let key = k.replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                bail!("unknown config key {k:?}");
            }
            if v.is_object() || v.is_array() {
                bail!("config key {k:?}: nested values are not allowed");
            }
            map.insert(key, v);
        }
        Ok(Config(map))
    }

    /// The flag value if given, else the config value.
    pub fn pick<T: DeserializeOwned>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .with_context(|| format!("config key {key:?} has the wrong type")),
        }
    }

    /// A boolean switch: set on the command line or true in the config.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let c = Config::parse(r#"{"tol": 1e-8, "a-grid": "1:2:3", "json": true}"#).unwrap();
        assert_eq!(c.pick(Some(1e-6), "tol").unwrap(), Some(1e-6));
        assert_eq!(c.pick::<f64>(None, "tol").unwrap(), Some(1e-8));
        assert_eq!(
            c.pick::<String>(None, "a_grid").unwrap().as_deref(),
            Some("1:2:3")
        );
        assert!(c.switch(false, "json").unwrap());
        assert_eq!(c.pick::<f64>(None, "theta").unwrap(), None);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(Config::parse("[1]").is_err());
        assert!(Config::parse(r#"{"bogus": 1}"#).is_err());
        assert!(Config::parse(r#"{"tol": {"x": 1}}"#).is_err());
        let c = Config::parse(r#"{"tol": "small"}"#).unwrap();
        assert!(c.pick::<f64>(None, "tol").is_err());
    }
}

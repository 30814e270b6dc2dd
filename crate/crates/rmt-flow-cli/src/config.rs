//! Optional TOML configuration. Keys use the long flag names; a top-level
//! key applies to every command and a `[simulate]`, `[verify]` or `[density]`
//! table overrides it for that command. Flags given on the command line
//! always win.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub fn load(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    let table: toml::Table = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
    match serde_json::to_value(table)? {
        Value::Object(m) => Ok(m),
        _ => bail!("config {} is not a table", path.display()),
    }
}

/// Keys for `section`: top-level scalars overlaid with the section table.
pub fn section(config: &Map<String, Value>, name: &str) -> Map<String, Value> {
    let mut out: Map<String, Value> = config.iter().filter(|(_, v)| !v.is_object()).map(|(k, v)| (k.clone(), v.clone())).collect();
    if let Some(Value::Object(sub)) = config.get(name) {
        for (k, v) in sub {
            out.insert(k.clone(), v.clone());
        }
    }
    out
}

/// Fills every unset (None) field of `args` from `keys`.
pub fn fill<T: Serialize + DeserializeOwned>(args: T, keys: &Map<String, Value>) -> Result<T> {
    let mut v = serde_json::to_value(&args)?;
    let obj = v.as_object_mut().expect("argument structs serialize to objects");
    for (k, val) in keys {
        let key = k.replace('_', "-");
        if let Some(slot) = obj.get_mut(&key) {
            if slot.is_null() {
                *slot = val.clone();
            }
        }
    }
    serde_json::from_value(v).context("config value has the wrong type")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Serialize, Deserialize, Debug, PartialEq)]
    #[serde(rename_all = "kebab-case")]
    struct A {
        seed: Option<u64>,
        big_t: Option<f64>,
        kind: Option<String>,
    }

    #[test]
    fn flags_win_and_sections_override() {
        let cfg: toml::Table = toml::from_str("seed = 1\nbig-t = 2.0\n[simulate]\nseed = 5\nkind = 'gue'\n").unwrap();
        let cfg = match serde_json::to_value(cfg).unwrap() {
            Value::Object(m) => m,
            _ => unreachable!(),
        };
        let keys = section(&cfg, "simulate");
        let a = fill(A { seed: None, big_t: None, kind: Some("goe".into()) }, &keys).unwrap();
        assert_eq!(a, A { seed: Some(5), big_t: Some(2.0), kind: Some("goe".into()) });
        let b = fill(A { seed: None, big_t: None, kind: None }, &section(&cfg, "verify")).unwrap();
        assert_eq!(b.seed, Some(1));
        assert_eq!(b.kind, None);
    }
}

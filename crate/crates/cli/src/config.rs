//! Resolution of run parameters: config-file tables overlaid by command-line flags.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::CliError;

/// A decimal kept as text so no precision is lost before parsing at the
/// working precision. Config files may also give plain numbers.
#[derive(Clone, Debug, PartialEq)]
pub struct Dec(pub String);

impl Dec {
    pub fn new(s: &str) -> Self {
        Dec(s.to_string())
    }
}

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            S(String),
            I(i64),
            F(f64),
        }
        Ok(Dec(match Repr::deserialize(d)? {
            Repr::S(s) => s,
            Repr::I(i) => i.to_string(),
            Repr::F(f) => f.to_string(),
        }))
    }
}

/// Parsed config file: top-level globals plus one table per subcommand.
#[derive(Debug, Default)]
pub struct ConfigFile {
    pub globals: Map<String, Value>,
    pub tables: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::input(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let table: toml::Table = toml::from_str(text).map_err(|e| CliError::input(format!("config: {e}")))?;
        let Value::Object(all) = serde_json::to_value(table).map_err(|e| CliError::input(format!("config: {e}")))? else {
            unreachable!("a TOML table converts to an object")
        };
        let mut out = ConfigFile::default();
        for (k, v) in all {
            if v.is_object() {
                out.tables.insert(k, v);
            } else {
                out.globals.insert(k, v);
            }
        }
        Ok(out)
    }

    pub fn table(&self, command: &str) -> Map<String, Value> {
        match self.tables.get(command) {
            Some(Value::Object(m)) => m.clone(),
            _ => Map::new(),
        }
    }
}

fn as_object<T: Serialize>(x: &T) -> Map<String, Value> {
    match serde_json::to_value(x) {
        Ok(Value::Object(m)) => m,
        _ => Map::new(),
    }
}

/// Overlays `flags` on `base`, deserializes the result and rejects keys the
/// parameter type does not know.
pub fn resolve<F: Serialize, P: Serialize + DeserializeOwned>(mut base: Map<String, Value>, flags: &F) -> Result<P, CliError> {
    for (k, v) in as_object(flags) {
        if !v.is_null() {
            base.insert(k, v);
        }
    }
    let keys: Vec<String> = base.keys().cloned().collect();
    let params: P = serde_json::from_value(Value::Object(base)).map_err(|e| CliError::input(format!("parameters: {e}")))?;
    let known = as_object(&params);
    if let Some(bad) = keys.iter().find(|k| !known.contains_key(*k)) {
        return Err(CliError::input(format!("unknown parameter {bad:?}")));
    }
    Ok(params)
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).unwrap_or(Value::Null)
}

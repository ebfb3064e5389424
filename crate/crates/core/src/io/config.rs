//! Command configuration: a JSON file merged with command-line flags.
//!
//! Every command declares its keys with types and defaults. The file is a flat
//! JSON object holding the global keys (`seed`, `threads`, `out`, `format`) and
//! command keys; flags override file values and the overridden keys are
//! recorded in the resolved [`Config`].

use std::collections::BTreeMap;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("unknown key `{key}`{}", suggestion.as_ref().map(|s| format!(", did you mean `{s}`?")).unwrap_or_default())]
    UnknownKey { key: String, suggestion: Option<String> },
    #[error("key `{key}`: expected {expected}, got `{found}`")]
    TypeError { key: String, expected: &'static str, found: String },
    #[error("malformed configuration: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ValueKind {
    /// Nonnegative integer.
    Int,
    Float,
    Bool,
    Str,
    /// Any JSON value; flags are parsed as JSON, falling back to a string.
    Json,
}

impl ValueKind {
    fn name(self) -> &'static str {
        match self {
            ValueKind::Int => "a nonnegative integer",
            ValueKind::Float => "a number",
            ValueKind::Bool => "true or false",
            ValueKind::Str => "a string",
            ValueKind::Json => "a JSON value",
        }
    }

    fn check(self, key: &str, v: Value) -> Result<Value, ConfigError> {
        let ok = match self {
            ValueKind::Int => v.is_u64(),
            ValueKind::Float => v.is_number(),
            ValueKind::Bool => v.is_boolean(),
            ValueKind::Str => v.is_string(),
            ValueKind::Json => true,
        };
        if ok {
            Ok(v)
        } else {
            Err(ConfigError::TypeError { key: key.into(), expected: self.name(), found: v.to_string() })
        }
    }

    /// Typed value of a flag argument.
    fn parse_flag(self, key: &str, raw: &str) -> Result<Value, ConfigError> {
        let bad = || ConfigError::TypeError { key: key.into(), expected: self.name(), found: raw.into() };
        match self {
            ValueKind::Int => raw.parse::<u64>().map(Value::from).map_err(|_| bad()),
            ValueKind::Float => raw.parse::<f64>().ok().and_then(|f| serde_json::Number::from_f64(f)).map(Value::Number).ok_or_else(bad),
            ValueKind::Bool => raw.parse::<bool>().map(Value::Bool).map_err(|_| bad()),
            ValueKind::Str => Ok(Value::String(raw.into())),
            ValueKind::Json => Ok(serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()))),
        }
    }
}

/// One documented command key.
#[derive(Debug, Clone, Copy)]
pub struct KeySpec {
    pub name: &'static str,
    pub kind: ValueKind,
    /// Default as JSON text.
    pub default: &'static str,
    pub doc: &'static str,
}

impl KeySpec {
    pub const fn new(name: &'static str, kind: ValueKind, default: &'static str, doc: &'static str) -> Self {
        Self { name, kind, default, doc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    #[default]
    Jsonl,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(Format::Csv),
            "jsonl" => Some(Format::Jsonl),
            _ => None,
        }
    }
}

/// Where the master seed came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    File,
    /// Drawn from OS entropy and recorded here.
    Entropy,
}

/// Command-line values; `None` means "not given".
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Flags {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    /// `key=value` command parameters.
    pub params: Vec<(String, String)>,
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub master_seed: u64,
    pub seed_source: SeedSource,
    pub out: PathBuf,
    /// 0 lets the thread pool choose.
    pub threads: usize,
    pub format: Format,
    /// Keys given both in the file and as flags; the flag won.
    pub overridden: Vec<String>,
}

pub const GLOBAL_KEYS: [&str; 4] = ["seed", "threads", "out", "format"];
pub const DEFAULT_OUT: &str = "out";

/// Nearest valid key by edit distance.
pub fn suggest<'a>(key: &str, valid: impl IntoIterator<Item = &'a str>) -> Option<String> {
    valid.into_iter().map(|v| (strsim::levenshtein(key, v), v)).min_by_key(|&(d, _)| d).map(|(_, v)| v.to_string())
}

fn unknown(key: &str, schema: &[KeySpec]) -> ConfigError {
    ConfigError::UnknownKey { key: key.into(), suggestion: suggest(key, schema.iter().map(|k| k.name).chain(GLOBAL_KEYS)) }
}

/// Merges defaults, the file (a JSON object) and flags, in that order.
pub fn parse_config(command: &str, schema: &[KeySpec], flags: &Flags, file: Option<&str>) -> Result<Config, ConfigError> {
    let spec = |key: &str| schema.iter().find(|k| k.name == key).ok_or_else(|| unknown(key, schema));
    let mut params = BTreeMap::new();
    for k in schema {
        let v = serde_json::from_str(k.default).map_err(|e| ConfigError::Malformed(format!("default of `{}`: {e}", k.name)))?;
        params.insert(k.name.to_string(), v);
    }
    let mut seed = None;
    let mut threads = 0usize;
    let mut out = PathBuf::from(DEFAULT_OUT);
    let mut format = Format::default();
    let mut from_file = Vec::new();
    if let Some(text) = file {
        let obj: serde_json::Map<String, Value> = serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
        for (key, v) in obj {
            let type_err = |expected, v: &Value| ConfigError::TypeError { key: key.clone(), expected, found: v.to_string() };
            match key.as_str() {
                "seed" => seed = Some(v.as_u64().ok_or_else(|| type_err(ValueKind::Int.name(), &v))?),
                "threads" => threads = v.as_u64().ok_or_else(|| type_err(ValueKind::Int.name(), &v))? as usize,
                "out" => out = v.as_str().ok_or_else(|| type_err(ValueKind::Str.name(), &v))?.into(),
                "format" => format = v.as_str().and_then(Format::parse).ok_or_else(|| type_err("`csv` or `jsonl`", &v))?,
                _ => {
                    let k = spec(&key)?;
                    params.insert(key.clone(), k.kind.check(&key, v)?);
                }
            }
            from_file.push(key);
        }
    }
    let mut overridden = Vec::new();
    let mut note = |key: &str| {
        if from_file.iter().any(|k| k == key) && !overridden.iter().any(|k| k == key) {
            overridden.push(key.to_string());
        }
    };
    let seed_source = match (flags.seed, seed) {
        (Some(s), _) => {
            note("seed");
            seed = Some(s);
            SeedSource::Flag
        }
        (None, Some(_)) => SeedSource::File,
        (None, None) => {
            seed = Some(rand::random());
            SeedSource::Entropy
        }
    };
    if let Some(t) = flags.threads {
        note("threads");
        threads = t;
    }
    if let Some(o) = &flags.out {
        note("out");
        out = o.clone();
    }
    if let Some(f) = flags.format {
        note("format");
        format = f;
    }
    for (key, raw) in &flags.params {
        let k = spec(key)?;
        note(key);
        params.insert(key.clone(), k.kind.parse_flag(key, raw)?);
    }
    Ok(Config {
        command: command.into(),
        params,
        master_seed: seed.expect("seed resolved above"),
        seed_source,
        out,
        threads,
        format,
        overridden,
    })
}

impl Config {
    fn raw(&self, key: &str) -> Result<&Value, ConfigError> {
        self.params.get(key).ok_or_else(|| ConfigError::UnknownKey { key: key.into(), suggestion: suggest(key, self.params.keys().map(String::as_str)) })
    }

    pub fn get<T: DeserializeOwned>(&self, key: &str) -> Result<T, ConfigError> {
        let v = self.raw(key)?;
        serde_json::from_value(v.clone()).map_err(|_| ConfigError::TypeError {
            key: key.into(),
            expected: std::any::type_name::<T>(),
            found: v.to_string(),
        })
    }

    pub fn usize(&self, key: &str) -> Result<usize, ConfigError> {
        self.get(key)
    }

    pub fn f64(&self, key: &str) -> Result<f64, ConfigError> {
        self.get(key)
    }

    pub fn string(&self, key: &str) -> Result<String, ConfigError> {
        self.get(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHEMA: [KeySpec; 3] = [
        KeySpec::new("epsilon", ValueKind::Float, "0.3", "blanket parameter"),
        KeySpec::new("replicates", ValueKind::Int, "100", "replicate count"),
        KeySpec::new("model", ValueKind::Json, r#"{"kind":"gw-tree"}"#, "model"),
    ];

    #[test]
    fn defaults_echoed() {
        let c = parse_config("blanket", &SCHEMA, &Flags { seed: Some(1), ..Flags::default() }, Some("{}")).unwrap();
        assert_eq!(c.f64("epsilon").unwrap(), 0.3);
        assert_eq!(c.usize("replicates").unwrap(), 100);
        assert_eq!(c.out, PathBuf::from(DEFAULT_OUT));
        assert!(c.overridden.is_empty());
    }

    #[test]
    fn flag_beats_file_and_is_recorded() {
        let flags = Flags { params: vec![("epsilon".into(), "0.5".into())], threads: Some(2), ..Flags::default() };
        let c = parse_config("blanket", &SCHEMA, &flags, Some(r#"{"epsilon": 0.1, "seed": 9, "threads": 4}"#)).unwrap();
        assert_eq!(c.f64("epsilon").unwrap(), 0.5);
        assert_eq!((c.master_seed, c.seed_source, c.threads), (9, SeedSource::File, 2));
        assert_eq!(c.overridden, vec!["threads".to_string(), "epsilon".to_string()]);
    }

    #[test]
    fn entropy_seed_is_recorded() {
        let c = parse_config("blanket", &SCHEMA, &Flags::default(), None).unwrap();
        assert_eq!(c.seed_source, SeedSource::Entropy);
        let json = serde_json::to_string(&c).unwrap();
        let back: Config = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn typos_name_the_nearest_key() {
        for (typo, want) in [("epsilom", "epsilon"), ("replicate", "replicates"), ("modle", "model"), ("sed", "seed"), ("thread", "threads"), ("fromat", "format")] {
            let flags = Flags { seed: Some(0), params: vec![(typo.into(), "1".into())], ..Flags::default() };
            match parse_config("x", &SCHEMA, &flags, None) {
                Err(ConfigError::UnknownKey { key, suggestion }) => {
                    assert_eq!(key, typo);
                    assert_eq!(suggestion.as_deref(), Some(want), "{typo}");
                }
                other => panic!("{typo}: {other:?}"),
            }
            let file = format!("{{\"{typo}\": 1}}");
            assert!(matches!(parse_config("x", &SCHEMA, &Flags::default(), Some(&file)), Err(ConfigError::UnknownKey { .. })));
        }
    }

    #[test]
    fn type_errors_name_the_key() {
        let flags = Flags { params: vec![("replicates".into(), "many".into())], ..Flags::default() };
        assert!(matches!(parse_config("x", &SCHEMA, &flags, None), Err(ConfigError::TypeError { key, .. }) if key == "replicates"));
        assert!(matches!(
            parse_config("x", &SCHEMA, &Flags::default(), Some(r#"{"epsilon": "big"}"#)),
            Err(ConfigError::TypeError { key, .. }) if key == "epsilon"
        ));
        assert!(matches!(
            parse_config("x", &SCHEMA, &Flags::default(), Some(r#"{"format": "xml"}"#)),
            Err(ConfigError::TypeError { key, .. }) if key == "format"
        ));
    }
}

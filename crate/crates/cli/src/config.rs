//! `--config file.json` handling: keys of the JSON object replace the
//! matching flag values.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

pub const SEED_ENV: &str = "PROXAMA_SEED";
pub const DEFAULT_SEED: u64 = 42;

pub fn apply_config<T: Serialize + DeserializeOwned>(args: T, path: Option<&Path>) -> CliResult<T> {
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let overrides: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let Value::Object(overrides) = overrides else {
        return Err(CliError::Parse(format!("{}: expected a JSON object", path.display())));
    };
    let mut merged = serde_json::to_value(&args).expect("argument structs serialize");
    let map = merged.as_object_mut().expect("argument structs are objects");
    for (key, value) in overrides {
        let key = key.replace('-', "_");
        if key == "config" || !map.contains_key(&key) {
            return Err(CliError::Config(format!("unknown config key `{key}`")));
        }
        map.insert(key, value);
    }
    serde_json::from_value(merged).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Flag or config value, then `PROXAMA_SEED`, then the default.
pub fn resolve_seed(explicit: Option<u64>) -> CliResult<u64> {
    if let Some(s) = explicit {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Config(format!("{SEED_ENV}={v} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

//! Layered JSON configuration: defaults, then a config file, then
//! `--set key.path=value` overrides. Unknown keys are rejected at every layer.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

/// Merge `overlay` into `base`; objects merge key by key, anything else
/// replaces.
pub fn merge(base: &mut Value, overlay: Value) {
    match (base, overlay) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) => merge(slot, v),
                    None => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

/// Parse `a.b.c=value`. The value is read as JSON when it parses, otherwise
/// as a plain string.
pub fn parse_override(spec: &str) -> CliResult<(Vec<String>, Value)> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{spec}` is not key=value")))?;
    let path: Vec<String> = key.trim().split('.').map(str::to_owned).collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key `{key}` has an empty segment")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_owned()));
    Ok((path, value))
}

/// Set a dotted path; the path must already exist in `root` so typos are
/// reported by name instead of silently creating keys.
pub fn set_path(root: &mut Value, path: &[String], value: Value) -> CliResult<()> {
    let mut node = root;
    for (i, seg) in path.iter().enumerate() {
        let obj = node.as_object_mut().ok_or_else(|| {
            CliError::Config(format!("`{}` is not an object", path[..i].join(".")))
        })?;
        if !obj.contains_key(seg) {
            return Err(CliError::Config(format!("unknown configuration key `{}`", path[..=i].join("."))));
        }
        node = obj.get_mut(seg).unwrap();
    }
    *node = value;
    Ok(())
}

/// Reject keys of `overlay` that `base` does not have, naming the full path.
fn check_known(base: &Value, overlay: &Value, prefix: &str) -> CliResult<()> {
    if let (Value::Object(b), Value::Object(o)) = (base, overlay) {
        for (k, v) in o {
            let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
            match b.get(k) {
                None => return Err(CliError::Config(format!("unknown configuration key `{path}`"))),
                Some(bv) if bv.is_object() => check_known(bv, v, &path)?,
                Some(_) => {}
            }
        }
    }
    Ok(())
}

/// Resolve the effective configuration of type `T`.
///
/// `seed` (from `--seed`) is written to every dotted path in `seed_paths`
/// before the `--set` overrides, so explicit overrides still win.
pub fn resolve<T: Serialize + DeserializeOwned + Default>(
    file: Option<&Path>,
    seed: Option<u64>,
    seed_paths: &[&str],
    overrides: &[String],
) -> CliResult<(T, Value)> {
    let mut value = serde_json::to_value(T::default())
        .map_err(|e| CliError::Runtime(format!("default configuration: {e}")))?;
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let overlay: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if !overlay.is_object() {
            return Err(CliError::Config(format!("{}: top level must be an object", path.display())));
        }
        check_known(&value, &overlay, "")?;
        merge(&mut value, overlay);
    }
    if let Some(seed) = seed {
        for p in seed_paths {
            let path: Vec<String> = p.split('.').map(str::to_owned).collect();
            set_path(&mut value, &path, Value::from(seed))?;
        }
    }
    for o in overrides {
        let (path, v) = parse_override(o)?;
        set_path(&mut value, &path, v)?;
    }
    let typed: T = serde_json::from_value(value.clone()).map_err(|e| CliError::Config(e.to_string()))?;
    // Echo the typed form so the manifest shows exactly what was used.
    let effective = serde_json::to_value(&typed).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok((typed, effective))
}

/// Object with one entry, for nesting values in manifests.
pub fn object(entries: impl IntoIterator<Item = (&'static str, Value)>) -> Value {
    Value::Object(entries.into_iter().map(|(k, v)| (k.to_owned(), v)).collect::<Map<_, _>>())
}

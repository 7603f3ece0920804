//! Option resolution: command-line flag, then config file, then default.
//!
//! A config file is either flat `key = value` text (`#` starts a comment) or
//! a run manifest written by a previous invocation, whose `config` object is
//! read back so the run can be repeated exactly.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let file = if text.trim_start().starts_with('{') {
            from_manifest(&text, path)?
        } else {
            parse_flat(&text, path)?
        };
        Ok(Self {
            file,
            resolved: BTreeMap::new(),
        })
    }

    /// Flag value if given, else the file's value, else `default`.
    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.file.get(key) {
                Some(raw) => raw
                    .parse()
                    .map_err(|e| CliError::usage(format!("config key `{key}`: {e}")))?,
                None => default,
            },
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Like [`Settings::get`] without a default; a missing value is a usage error.
    pub fn require<T>(&mut self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match flag {
            Some(v) => v,
            None => {
                let raw = self
                    .file
                    .get(key)
                    .ok_or_else(|| CliError::usage(format!("missing required option --{key}")))?;
                raw.parse()
                    .map_err(|e| CliError::usage(format!("config key `{key}`: {e}")))?
            }
        };
        self.resolved.insert(key.to_string(), value.to_string());
        Ok(value)
    }

    /// Optional value with no default; recorded only when present.
    pub fn optional<T>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        if flag.is_none() && !self.file.contains_key(key) {
            return Ok(None);
        }
        self.require(key, flag).map(Some)
    }

    /// Rejects config keys that no option consumed.
    pub fn finish(self) -> Result<BTreeMap<String, String>, CliError> {
        if let Some(k) = self.file.keys().find(|k| !self.resolved.contains_key(*k)) {
            return Err(CliError::usage(format!("unknown config key `{k}`")));
        }
        Ok(self.resolved)
    }
}

fn parse_flat(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| {
            CliError::usage(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                i + 1
            ))
        })?;
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn from_manifest(text: &str, path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let v: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
    let config = v.get("config").and_then(|c| c.as_object()).ok_or_else(|| {
        CliError::usage(format!("{}: manifest has no config object", path.display()))
    })?;
    config
        .iter()
        .map(|(k, v)| match v {
            serde_json::Value::String(s) => Ok((k.clone(), s.clone())),
            other => Ok((k.clone(), other.to_string())),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file_values() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("run.cfg");
        std::fs::write(&p, "# grid cell\nsteps = 50\nseed = 4\n").unwrap();
        let mut s = Settings::load(Some(&p)).unwrap();
        assert_eq!(s.get("steps", None, 10usize).unwrap(), 50);
        assert_eq!(s.get("seed", Some(9u64), 0).unwrap(), 9);
        assert_eq!(s.get("batch-size", None, 128usize).unwrap(), 128);
        let resolved = s.finish().unwrap();
        assert_eq!(resolved["seed"], "9");
    }

    #[test]
    fn unknown_and_malformed_keys_are_usage_errors() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.cfg");
        std::fs::write(&p, "stepz = 3\n").unwrap();
        let s = Settings::load(Some(&p)).unwrap();
        assert!(s.finish().is_err());
        std::fs::write(&p, "steps 3\n").unwrap();
        assert!(Settings::load(Some(&p)).is_err());
    }

    #[test]
    fn manifests_are_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("manifest.json");
        std::fs::write(
            &p,
            r#"{"command":"modedrop","config":{"n":"10","trials":"5"}}"#,
        )
        .unwrap();
        let mut s = Settings::load(Some(&p)).unwrap();
        assert_eq!(s.require::<usize>("n", None).unwrap(), 10);
        assert_eq!(s.get("trials", None, 1000usize).unwrap(), 5);
    }
}

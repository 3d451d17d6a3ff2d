//! Flat `key = value` settings read from an INI-style file, with command-line
//! values layered on top.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ini::Ini;

/// A problem with the configuration itself. Maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub type ConfigResult<T> = Result<T, ConfigError>;

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
    source: Option<PathBuf>,
}

impl Settings {
    /// Reads a flat file. Sections are rejected: every key lives at the top level.
    pub fn from_file(path: &Path) -> ConfigResult<Self> {
        if !path.exists() {
            return Err(ConfigError(format!("config file {} not found", path.display())));
        }
        let ini = Ini::load_from_file(path).map_err(|e| ConfigError(format!("cannot parse {}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (section, props) in ini.iter() {
            if let Some(name) = section {
                return Err(ConfigError(format!("{}: sections are not supported (found [{name}])", path.display())));
            }
            for (k, v) in props.iter() {
                values.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        Ok(Self { values, source: Some(path.to_path_buf()) })
    }

    pub fn load(path: Option<&Path>) -> ConfigResult<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::from_file)
    }

    /// Command-line values win over the file.
    pub fn overlay<I: IntoIterator<Item = (&'static str, Option<String>)>>(mut self, overrides: I) -> Self {
        for (k, v) in overrides {
            if let Some(v) = v {
                self.values.insert(k.to_string(), v);
            }
        }
        self
    }

    /// Fails on any key the command does not understand, so typos are not silently ignored.
    pub fn check_known(&self, known: &[&str]) -> ConfigResult<()> {
        match self.values.keys().find(|k| !known.contains(&k.as_str()) && k.as_str() != "seed") {
            Some(k) => Err(ConfigError(format!("unknown key `{k}`{}; expected one of {}", self.origin(), known.join(", ")))),
            None => Ok(()),
        }
    }

    fn origin(&self) -> String {
        self.source.as_ref().map(|p| format!(" in {}", p.display())).unwrap_or_default()
    }

    pub fn get<T: FromStr>(&self, key: &str) -> ConfigResult<Option<T>>
    where
        T::Err: fmt::Display,
    {
        self.values
            .get(key)
            .map(|raw| raw.parse().map_err(|e| ConfigError(format!("bad value `{raw}` for `{key}`{}: {e}", self.origin()))))
            .transpose()
    }

    pub fn or<T: FromStr>(&self, key: &str, default: T) -> ConfigResult<T>
    where
        T::Err: fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, key: &str) -> ConfigResult<T>
    where
        T::Err: fmt::Display,
    {
        self.get(key)?.ok_or_else(|| ConfigError(format!("missing required key `{key}`{}", self.origin())))
    }

    /// Comma-separated list.
    pub fn list_or<T: FromStr + Clone>(&self, key: &str, default: &[T]) -> ConfigResult<Vec<T>>
    where
        T::Err: fmt::Display,
    {
        let Some(raw) = self.values.get(key) else {
            return Ok(default.to_vec());
        };
        raw.split(',')
            .map(|item| {
                let item = item.trim();
                item.parse().map_err(|e| ConfigError(format!("bad list item `{item}` for `{key}`{}: {e}", self.origin())))
            })
            .collect()
    }

    pub fn string_or(&self, key: &str, default: &str) -> String {
        self.values.get(key).cloned().unwrap_or_else(|| default.to_string())
    }

    /// Resolved values, for echoing into manifests.
    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_overrides() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ini");
        std::fs::write(&path, "# comment\nn = 4\nm=2\nlambdas = 0.2, 0.1\n").unwrap();
        let s = Settings::from_file(&path).unwrap().overlay([("m", Some("3".to_string())), ("mu", None)]);
        assert_eq!(s.require::<usize>("n").unwrap(), 4);
        assert_eq!(s.require::<usize>("m").unwrap(), 3);
        assert_eq!(s.or("mu", 1.5).unwrap(), 1.5);
        assert_eq!(s.list_or::<f64>("lambdas", &[]).unwrap(), vec![0.2, 0.1]);
        assert!(s.check_known(&["n", "m", "lambdas"]).is_ok());
        assert!(s.check_known(&["n"]).unwrap_err().0.contains("unknown key"));
    }

    #[test]
    fn diagnostics_name_the_problem() {
        let missing = Settings::from_file(Path::new("/nonexistent/run.ini")).unwrap_err();
        assert!(missing.0.contains("/nonexistent/run.ini"));
        let s = Settings::default().overlay([("n", Some("four".to_string()))]);
        assert!(s.require::<usize>("n").unwrap_err().0.contains("`n`"));
        assert!(s.require::<usize>("m").unwrap_err().0.contains("missing required key `m`"));
    }

    #[test]
    fn sections_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.ini");
        std::fs::write(&path, "[gap]\nn = 4\n").unwrap();
        assert!(Settings::from_file(&path).unwrap_err().0.contains("sections"));
    }
}

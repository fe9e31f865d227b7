//! The optional `key = value` settings file.
//!
//! Recognised keys: `tol` (evaluation tolerance), `quad_rel_tol`, `quad_max_subdivisions`, and
//! `check.<id>` for identity tolerances. Blank lines and `#` comments are ignored.

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub tol: Option<f64>,
    pub quad_rel_tol: Option<f64>,
    pub quad_max_subdivisions: Option<usize>,
    pub check_tols: BTreeMap<String, f64>,
}

fn number<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, ConfigError> {
    v.parse().map_err(|_| ConfigError::Syntax { line, msg: format!("'{key}' needs a number, got '{v}'") })
}

pub fn parse(text: &str) -> Result<Settings, ConfigError> {
    let mut s = Settings::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .map(|(k, v)| (k.trim(), v.trim()))
            .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected key = value, got '{body}'") })?;
        match key {
            "tol" => s.tol = Some(number(line, key, value)?),
            "quad_rel_tol" => s.quad_rel_tol = Some(number(line, key, value)?),
            "quad_max_subdivisions" => s.quad_max_subdivisions = Some(number(line, key, value)?),
            _ => match key.strip_prefix("check.") {
                Some(id) if !id.is_empty() => {
                    s.check_tols.insert(id.to_string(), number(line, key, value)?);
                }
                _ => return Err(ConfigError::Syntax { line, msg: format!("unknown key '{key}'") }),
            },
        }
    }
    Ok(s)
}

pub fn load(path: &Path) -> Result<Settings, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
    parse(&text)
}

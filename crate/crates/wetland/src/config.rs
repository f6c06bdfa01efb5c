//! `name = value` configuration files.
//!
//! The nine model keys are required. A scenario file may add run keys:
//! `x3_mode` (zero | one | profile | sech2), `amplitude`, `mode`,
//! `t_end`, `dt`, `record_dt`, `grid_n`, `reference` (e1 | e2).

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;
use wetland_core::ModelParams;

use crate::scenario::{Reference, Scenario, X3Mode};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `name = value`, got {text:?}")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key {key:?}")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: bad value for {key}: {value:?}")]
    BadValue { line: usize, key: String, value: String },
    #[error("missing key {0}")]
    Missing(&'static str),
    #[error("invalid parameters: {0}")]
    Invalid(#[from] wetland_core::Error),
    #[error("reading {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

const RUN_KEYS: [&str; 8] = ["x3_mode", "amplitude", "mode", "t_end", "dt", "record_dt", "grid_n", "reference"];

struct Entry {
    line: usize,
    value: String,
}

fn entries(text: &str) -> Result<BTreeMap<String, Entry>, ConfigError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(ConfigError::Syntax { line, text: raw.to_string() });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(ConfigError::Syntax { line, text: raw.to_string() });
        }
        if !ModelParams::NAMES.contains(&k) && !RUN_KEYS.contains(&k) {
            return Err(ConfigError::UnknownKey { line, key: k.to_string() });
        }
        if out.contains_key(k) {
            return Err(ConfigError::Duplicate { line, key: k.to_string() });
        }
        out.insert(k.to_string(), Entry { line, value: v.to_string() });
    }
    Ok(out)
}

fn number<T: std::str::FromStr>(key: &str, e: &Entry) -> Result<T, ConfigError> {
    e.value.parse().map_err(|_| ConfigError::BadValue { line: e.line, key: key.to_string(), value: e.value.clone() })
}

fn params_from(map: &BTreeMap<String, Entry>) -> Result<ModelParams, ConfigError> {
    let mut a = [0.0; 9];
    for (slot, name) in a.iter_mut().zip(ModelParams::NAMES) {
        let e = map.get(name).ok_or(ConfigError::Missing(name))?;
        *slot = number(name, e)?;
    }
    let p = ModelParams::from_array(a);
    p.validate()?;
    Ok(p)
}

/// Parses model parameters; run keys are tolerated and ignored.
pub fn parse_params(text: &str) -> Result<ModelParams, ConfigError> {
    params_from(&entries(text)?)
}

/// Parses a scenario; absent run keys take the values of `defaults`.
pub fn parse_scenario(name: &str, text: &str, defaults: &Scenario) -> Result<Scenario, ConfigError> {
    let map = entries(text)?;
    let mut s = defaults.clone();
    s.name = name.to_string();
    s.params = params_from(&map)?;
    for (key, e) in &map {
        match key.as_str() {
            "x3_mode" => {
                s.x3_mode = X3Mode::parse(&e.value)
                    .ok_or_else(|| ConfigError::BadValue { line: e.line, key: key.clone(), value: e.value.clone() })?
            }
            "reference" => {
                s.reference = Reference::parse(&e.value)
                    .ok_or_else(|| ConfigError::BadValue { line: e.line, key: key.clone(), value: e.value.clone() })?
            }
            "amplitude" => s.amplitude = number(key, e)?,
            "mode" => s.mode = number(key, e)?,
            "t_end" => s.t_end = number(key, e)?,
            "dt" => s.dt = Some(number(key, e)?),
            "record_dt" => s.record_dt = number(key, e)?,
            "grid_n" => s.grid_n = number(key, e)?,
            _ => {}
        }
    }
    if s.t_end.is_nan() || s.t_end <= 0.0 {
        let e = &map["t_end"];
        return Err(ConfigError::BadValue { line: e.line, key: "t_end".into(), value: e.value.clone() });
    }
    Ok(s)
}

pub fn read_to_string(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })
}

/// Serializes parameters in the same format.
pub fn format_params(p: &ModelParams) -> String {
    p.entries().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = "# human-free set\nd1 = 1\nd2 = 1\nc = 1.0\nalpha = 0.5 # shape\nm = 1\nd = 0.9\nh1 = 0\nh2 = 0\nr = 1\n";

    #[test]
    fn parses_and_round_trips() {
        let p = parse_params(GOOD).unwrap();
        assert_eq!(p.alpha, 0.5);
        assert_eq!(parse_params(&format_params(&p)).unwrap(), p);
    }

    #[test]
    fn reports_line_numbers() {
        let bad = GOOD.replace("m = 1", "m 1");
        assert!(matches!(parse_params(&bad), Err(ConfigError::Syntax { line: 6, .. })));
        let bad = GOOD.replace("m = 1", "mm = 1");
        assert!(matches!(parse_params(&bad), Err(ConfigError::UnknownKey { line: 6, .. })));
        let bad = GOOD.replace("m = 1", "m = one");
        assert!(matches!(parse_params(&bad), Err(ConfigError::BadValue { line: 6, .. })));
        let bad = format!("{GOOD}d = 0.3\n");
        assert!(matches!(parse_params(&bad), Err(ConfigError::Duplicate { line: 11, .. })));
        let bad = GOOD.replace("r = 1\n", "");
        assert!(matches!(parse_params(&bad), Err(ConfigError::Missing("r"))));
        let bad = GOOD.replace("c = 1.0", "c = -1.0");
        assert!(matches!(parse_params(&bad), Err(ConfigError::Invalid(_))));
    }
}

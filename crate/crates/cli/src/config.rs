//! JSON model configs.

use rankone::hypotheses::validate;
use rankone::{ModelFunctions, ModelParams};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub params: ModelParams,
    #[serde(default)]
    pub functions: ModelFunctions,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}:{column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },
    #[error("hypothesis {hypothesis} violated: {detail}")]
    Validation { hypothesis: String, detail: String },
}

/// Parses config text. `path` is only used in error messages.
pub fn parse_config_str(text: &str, path: &Path, strict: bool) -> Result<(ModelParams, ModelFunctions), ConfigError> {
    let cfg: ConfigFile = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if strict {
        let report = validate(&cfg.params, &cfg.functions);
        let first = report.failures().next().map(|bad| (bad.name.to_string(), bad.detail.clone()));
        if let Some((hypothesis, detail)) = first {
            return Err(ConfigError::Validation { hypothesis, detail });
        }
    }
    Ok((cfg.params, cfg.functions))
}

/// Reads and parses a config. Missing `functions` means the sine family;
/// with `strict`, the first failed hypothesis H1-H6 is an error.
pub fn parse_config(path: &Path, strict: bool) -> Result<(ModelParams, ModelFunctions), ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
    parse_config_str(&text, path, strict)
}

/// Canonical JSON text of a config.
pub fn emit_config(params: &ModelParams, functions: &ModelFunctions) -> String {
    let cfg = ConfigFile { params: *params, functions: functions.clone() };
    let mut s = serde_json::to_string_pretty(&cfg).expect("config serialises");
    s.push('\n');
    s
}

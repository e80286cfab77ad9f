//! Command-line front end for the `rankone` library.

pub mod commands;
pub mod config;
pub mod presets;
pub mod render;

pub use config::{emit_config, parse_config, parse_config_str, ConfigError, ConfigFile};
pub use presets::{figure_preset, FigurePreset, UnknownPreset, PRESET_NAMES};
pub use render::{render_ppm, Bounds, RenderError};

use thiserror::Error;

/// Failures carrying the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Preset(#[from] UnknownPreset),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numerical(String),
    #[error(transparent)]
    Sweep(#[from] rankone::sweep::SweepError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("{path}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rankone::sweep::SweepError;
        match self {
            CliError::Config(ConfigError::Io { .. }) | CliError::Io { .. } | CliError::Sweep(SweepError::Io(_)) => 4,
            CliError::Numerical(_) => 3,
            _ => 2,
        }
    }
}

/// Exit code for an error chain: 2 validation, 3 numerical, 4 I/O.
pub fn exit_code(err: &anyhow::Error) -> i32 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return e.exit_code();
        }
        if cause.downcast_ref::<std::io::Error>().is_some() {
            return 4;
        }
    }
    2
}

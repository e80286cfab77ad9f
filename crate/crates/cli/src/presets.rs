#![allow(clippy::approx_constant)]

//! Initial conditions and parameters of the published orbit figures.

use rankone::{ModelFunctions, ModelParams, PhaseState};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("unknown preset {0:?}; expected fig5, fig6, fig7 or fig8")]
pub struct UnknownPreset(pub String);

#[derive(Debug, Clone, PartialEq)]
pub struct FigurePreset {
    pub name: &'static str,
    pub params: ModelParams,
    pub functions: ModelFunctions,
    pub initial: PhaseState,
    pub burn: u64,
    pub samples: u64,
}

impl FigurePreset {
    /// Recorded iterates `n` lie in `(burn, burn + samples]`.
    pub fn window(&self) -> (u64, u64) {
        (self.burn, self.burn + self.samples)
    }
}

pub const PRESET_NAMES: [&str; 4] = ["fig5", "fig6", "fig7", "fig8"];

pub fn figure_preset(name: &str) -> Result<FigurePreset, UnknownPreset> {
    let base = ModelParams { delta: 2.0, b: 0.5, ..Default::default() };
    let (name, params, ic, burn, samples) = match name {
        "fig5" => (
            "fig5",
            ModelParams { eps1: 0.105, eps2: 0.0, delta1: 5.0, delta2: 0.0, alpha1: 6.2831, alpha2: 3.14155, ..base },
            (0.6961, 1.3277, 0.5856),
            1000,
            20_000,
        ),
        "fig6" => (
            "fig6",
            ModelParams { eps1: 0.1, eps2: 0.0, delta1: 10.0, delta2: 0.001, alpha1: 6.2832, alpha2: 4.4407, ..base },
            (0.9073, 1.4529, 0.5635),
            1500,
            30_000,
        ),
        "fig7" => (
            "fig7",
            ModelParams { eps1: 0.2, eps2: 0.1, delta1: 5.0, delta2: 0.001, alpha1: 6.2832, alpha2: 3.1416, ..base },
            (0.8394, 1.3789, 0.8716),
            5000,
            100_000,
        ),
        "fig8" => (
            "fig8",
            ModelParams { eps1: 0.2, eps2: 0.1, delta1: 5.0, delta2: 1e-7, alpha1: 6.2832, alpha2: 1.5708, ..base },
            (0.8162, 1.0488, 0.6393),
            5000,
            100_000,
        ),
        other => return Err(UnknownPreset(other.to_string())),
    };
    Ok(FigurePreset {
        name,
        params,
        functions: ModelFunctions::sine_family(),
        initial: PhaseState { x: ic.0, y: ic.1, t: ic.2 },
        burn,
        samples,
    })
}

#![allow(clippy::approx_constant)]

//! Forward orbits of the full map with escape detection.

use crate::error::MapError;
use crate::model::{Model, PhaseState};
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitConfig {
    pub burn: u64,
    pub samples: u64,
    /// Escape slack `μ`: states with `y` outside `[1-μ, 1+b+μ]` end the run.
    pub slack: f64,
    pub project: bool,
}

impl Default for OrbitConfig {
    fn default() -> Self {
        Self { burn: 0, samples: 1000, slack: 0.5, project: false }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum EscapeReason {
    Domain(f64),
    OutOfBand(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Escape {
    /// Number of map applications attempted when the orbit was lost (1-based).
    pub step: u64,
    pub reason: EscapeReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundingBox {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub t: [f64; 2],
    pub count: usize,
}

impl BoundingBox {
    pub fn of(states: &[PhaseState]) -> Option<Self> {
        let first = states.first()?;
        let mut b = BoundingBox { x: [first.x; 2], y: [first.y; 2], t: [first.t; 2], count: 0 };
        for s in states {
            b.x = [b.x[0].min(s.x), b.x[1].max(s.x)];
            b.y = [b.y[0].min(s.y), b.y[1].max(s.y)];
            b.t = [b.t[0].min(s.t), b.t[1].max(s.t)];
            b.count += 1;
        }
        Some(b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRun {
    /// Post-burn states; entry `k` is `F^(burn+k+1)(s0)`.
    pub states: Vec<PhaseState>,
    pub burn: u64,
    pub escape: Option<Escape>,
    pub project: bool,
    /// Box around the last 10% of the recorded states.
    pub omega_tail: Option<BoundingBox>,
}

impl OrbitRun {
    pub fn escaped(&self) -> bool {
        self.escape.is_some()
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", if self.project { "n,x,y,t,X,Y" } else { "n,x,y,t" })?;
        for (k, s) in self.states.iter().enumerate() {
            let n = self.burn + k as u64 + 1;
            if self.project {
                let (px, py) = s.project();
                writeln!(w, "{n},{},{},{},{px},{py}", s.x, s.y, s.t)?;
            } else {
                writeln!(w, "{n},{},{},{}", s.x, s.y, s.t)?;
            }
        }
        Ok(())
    }

    pub fn projected(&self) -> Vec<(f64, f64)> {
        self.states.iter().map(PhaseState::project).collect()
    }
}

/// Iterate `burn + samples` times, keeping the post-burn states.
///
/// Leaving the domain of definition or the slack band is recorded in
/// [`OrbitRun::escape`] and ends the run.
pub fn iterate_orbit(model: &Model, s0: PhaseState, cfg: &OrbitConfig) -> OrbitRun {
    let lo = 1.0 - cfg.slack;
    let hi = 1.0 + model.params.b + cfg.slack;
    let mut s = s0;
    let mut states = Vec::with_capacity(cfg.samples as usize);
    let mut escape = None;
    for step in 1..=cfg.burn + cfg.samples {
        match model.eval_map(&s) {
            Ok(next) if (lo..=hi).contains(&next.y) => s = next,
            Ok(next) => {
                escape = Some(Escape { step, reason: EscapeReason::OutOfBand(next.y) });
                break;
            }
            Err(MapError::LogDomain { value } | MapError::PowerDomain { value }) => {
                escape = Some(Escape { step, reason: EscapeReason::Domain(value) });
                break;
            }
        }
        if step > cfg.burn {
            states.push(s);
        }
    }
    let omega_tail = BoundingBox::of(&states[states.len() - states.len() / 10..]).or_else(|| BoundingBox::of(&states));
    OrbitRun { states, burn: cfg.burn, escape, project: cfg.project, omega_tail }
}

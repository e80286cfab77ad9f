//! Subcommands.

use crate::config::parse_config;
use crate::presets::figure_preset;
use crate::render::{render_ppm, Bounds};
use crate::CliError;
use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rankone::circle::{tongue_scan, CircleMap, ScanRegion, ScanSettings, DEFAULT_GRID_N, DEFAULT_Q_MAX};
use rankone::hypotheses::validate;
use rankone::limit::{convergence_table, ConvergenceGrid, LimitFamily};
use rankone::lyapunov::{lyapunov_spectrum, HistoryEntry};
use rankone::manifold::{horseshoe_evidence, GrowthConfig, HorseshoeSearch};
use rankone::misiurewicz::{misiurewicz_report, turn_nondegeneracy, MisiurewiczReport, TurnCheck};
use rankone::orbit::{iterate_orbit, OrbitConfig, OrbitRun};
use rankone::planar::{compose_restricted, saddle_search, seed_grid, RestrictedMap};
use rankone::sweep::{resume_sweep, SweepSpec};
use rankone::{Model, ModelFunctions, ModelParams, PhaseState};
use serde::Serialize;
use std::f64::consts::TAU;
use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "rankone", version, about = "Rotating rank-one maps on the solid torus")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check hypotheses H1-H6 for a config.
    Check {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        strict: bool,
    },
    /// Iterate one orbit and write it as CSV.
    Orbit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        burn: u64,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ppm: Option<PathBuf>,
        #[arg(long, default_value_t = 800)]
        width: usize,
        #[arg(long, default_value_t = 800)]
        height: usize,
    },
    /// Lyapunov spectrum along one orbit.
    Lyapunov {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        x0: f64,
        #[arg(long)]
        y0: f64,
        #[arg(long)]
        t0: f64,
        #[arg(long)]
        iters: u64,
        #[arg(long, default_value_t = 10)]
        qr_period: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rotation number of the circle factor.
    Rotation {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long)]
        iters: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rotation-number raster over the (alpha2, delta2) plane.
    Tongues {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_parser = parse_range)]
        a2: AxisRange,
        #[arg(long, value_parser = parse_range)]
        d2: AxisRange,
        #[arg(long, default_value_t = DEFAULT_Q_MAX)]
        qmax: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Distance to the singular limit along eps_(a,n).
    Limit {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long)]
        nmax: u32,
        /// Points along x; the ybar axis gets a quarter as many.
        #[arg(long, default_value_t = 256)]
        grid: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Misiurewicz and mixing diagnostics of the limit family.
    Misiurewicz {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 0.1)]
        delta0: f64,
        #[arg(long, default_value_t = 50)]
        horizon: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Saddles, invariant manifolds and their crossings.
    Manifolds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 4)]
        period_max: u32,
        #[arg(long)]
        arc: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Reproduce a published orbit figure.
    Figure {
        #[arg(long)]
        name: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        ppm: Option<PathBuf>,
    },
    /// Checkpointed parameter sweep.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

/// `lo:hi:n` with `n >= 1`.
pub fn parse_range(s: &str) -> Result<AxisRange, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts[..] else {
        return Err(format!("expected lo:hi:n, got {s:?}"));
    };
    let lo: f64 = lo.parse().map_err(|e| format!("bad lower bound {lo:?}: {e}"))?;
    let hi: f64 = hi.parse().map_err(|e| format!("bad upper bound {hi:?}: {e}"))?;
    let n: usize = n.parse().map_err(|e| format!("bad count {n:?}: {e}"))?;
    if n == 0 {
        return Err("count must be at least 1".into());
    }
    Ok(AxisRange { lo, hi, n })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })?;
    }
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("report serialises");
    s.push('\n');
    write_file(path, s.as_bytes())
}

fn load(config: &Path) -> Result<(ModelParams, ModelFunctions), CliError> {
    Ok(parse_config(config, false)?)
}

/// Default PPM window: the annulus `1 <= r <= 1 + b` with a margin.
pub fn orbit_bounds(b: f64) -> Bounds {
    Bounds::square(1.0 + b + 0.1)
}

fn orbit_outputs(run: &OrbitRun, out: &Path, ppm: Option<&Path>, bounds: &Bounds, size: (usize, usize)) -> Result<(), CliError> {
    let mut buf = Vec::new();
    run.write_csv(&mut buf).expect("writing to memory");
    write_file(out, &buf)?;
    if let Some(p) = ppm {
        write_file(p, &render_ppm(&run.projected(), bounds, size.0, size.1)?)?;
    }
    match run.escape {
        Some(e) => Err(CliError::Numerical(format!("orbit escaped at step {} ({:?}); {} states written", e.step, e.reason, run.states.len()))),
        None => Ok(()),
    }
}

#[derive(Serialize)]
struct EscapeInfo {
    escaped: bool,
    step: Option<u64>,
}

#[derive(Serialize)]
struct LyapunovJson<'a> {
    exponents: [f64; 3],
    sum: f64,
    mean_log_det: f64,
    quotient_exponent: f64,
    qr_period: u32,
    iters: u64,
    escape: EscapeInfo,
    history: &'a [HistoryEntry],
}

#[derive(Serialize)]
struct MisiurewiczJson<'a> {
    #[serde(flatten)]
    report: &'a MisiurewiczReport,
    turns: Vec<TurnCheck>,
}

fn restricted_map(model: &Model, period_max: u32) -> Result<RestrictedMap, CliError> {
    let p = model.params;
    if p.eps2 == 0.0 {
        return Ok(RestrictedMap::frozen(model.clone(), 0.0));
    }
    let circle = CircleMap::new(p.alpha2, p.delta2, model.funcs.psi3.clone());
    let est = circle.rotation_number(0.0, 10_000, 100_000, period_max).map_err(|e| CliError::Invalid(e.to_string()))?;
    let lock = est
        .locked
        .ok_or_else(|| CliError::Numerical(format!("circle factor is not locked at period <= {period_max} (rho = {})", est.rho)))?;
    let search = circle.find_periodic_orbits(lock.p as i64, lock.q, DEFAULT_GRID_N).map_err(|e| CliError::Numerical(e.to_string()))?;
    let orbit = search
        .orbits
        .iter()
        .find(|o| o.stable)
        .ok_or_else(|| CliError::Numerical(format!("no stable {}/{} orbit of the circle factor", lock.p, lock.q)))?;
    compose_restricted(model, &orbit.points).map_err(|e| CliError::Numerical(e.to_string()))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Check { config, strict } => {
            let (p, f) = parse_config(&config, strict)?;
            let report = validate(&p, &f);
            println!("{}", serde_json::to_string_pretty(&report)?);
            let first = report.failures().next().map(|bad| format!("hypothesis {} violated: {}", bad.name, bad.detail));
            if let Some(msg) = first {
                return Err(CliError::Invalid(msg).into());
            }
        }
        Command::Orbit { config, x0, y0, t0, burn, samples, out, ppm, width, height } => {
            let (p, f) = load(&config)?;
            let model = Model::new(p, f);
            let cfg = OrbitConfig { burn, samples, project: true, ..Default::default() };
            let run = iterate_orbit(&model, PhaseState::new(x0, y0, t0), &cfg);
            orbit_outputs(&run, &out, ppm.as_deref(), &orbit_bounds(p.b), (width, height))?;
        }
        Command::Lyapunov { config, x0, y0, t0, iters, qr_period, out } => {
            let (p, f) = load(&config)?;
            let e = lyapunov_spectrum(&Model::new(p, f), PhaseState::new(x0, y0, t0), iters, qr_period);
            write_json(
                &out,
                &LyapunovJson {
                    exponents: e.exponents,
                    sum: e.sum(),
                    mean_log_det: e.mean_log_det,
                    quotient_exponent: e.quotient_exponent,
                    qr_period: e.qr_period,
                    iters: e.iters,
                    escape: EscapeInfo { escaped: e.escaped_at.is_some(), step: e.escaped_at },
                    history: &e.history,
                },
            )?;
            if let Some(k) = e.escaped_at {
                return Err(CliError::Numerical(format!("orbit escaped after {k} steps; partial estimate written")).into());
            }
        }
        Command::Rotation { config, t0, iters, out } => {
            let (p, f) = load(&config)?;
            let est = CircleMap::new(p.alpha2, p.delta2, f.psi3)
                .rotation_number(t0, iters / 10, iters, DEFAULT_Q_MAX)
                .map_err(|e| CliError::Invalid(e.to_string()))?;
            write_json(&out, &est)?;
        }
        Command::Tongues { config, a2, d2, qmax, out } => {
            let (_, f) = load(&config)?;
            let region = ScanRegion { alpha2_lo: a2.lo, alpha2_hi: a2.hi, delta2_lo: d2.lo, delta2_hi: d2.hi };
            let grid = tongue_scan(&f.psi3, region, a2.n, d2.n, &ScanSettings { q_max: qmax, ..Default::default() });
            let mut buf = Vec::new();
            grid.write_csv(&mut buf).expect("writing to memory");
            write_file(&out, &buf)?;
        }
        Command::Limit { config, a, nmax, grid, out } => {
            let (p, f) = load(&config)?;
            let g = ConvergenceGrid { nx: grid.max(1), ny: (grid / 4).max(1), ..Default::default() };
            let rows = convergence_table(&p, &f, a, 1..=nmax, &g).map_err(|e| CliError::Numerical(e.to_string()))?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).context("csv")?;
            }
            write_file(&out, &w.into_inner().context("csv")?)?;
        }
        Command::Misiurewicz { config, a, delta0, horizon, out } => {
            let (p, f) = load(&config)?;
            let fam = LimitFamily::from_model(a, &p, &f);
            let report = misiurewicz_report(&fam, delta0, horizon, 256);
            write_json(&out, &MisiurewiczJson { report: &report, turns: turn_nondegeneracy(&fam, &f) })?;
        }
        Command::Manifolds { config, period_max, arc, out } => {
            let (p, f) = load(&config)?;
            let model = Model::new(p, f);
            let map = restricted_map(&model, period_max)?;
            let seeds = seed_grid((0.0, TAU), (1.0, 1.0 + p.b), 16, 8);
            let saddles = saddle_search(&map, period_max, &seeds);
            let ev = match horseshoe_evidence(&map, &saddles, arc, 5_000_000, &GrowthConfig::default()) {
                HorseshoeSearch::Found(ev) => ev,
                HorseshoeSearch::NoSaddle => {
                    return Err(CliError::Numerical(format!("no saddle of period <= {period_max} found")).into());
                }
                HorseshoeSearch::NoTransverseCrossing { saddles_tried } => {
                    return Err(CliError::Numerical(format!("{saddles_tried} saddles tried, no transverse crossing at arclength {arc}")).into());
                }
            };
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["kind", "index", "x", "y", "angle"]).context("csv")?;
            let s = &ev.saddle;
            w.write_record(["saddle".into(), s.period.to_string(), s.point[0].to_string(), s.point[1].to_string(), String::new()]).context("csv")?;
            for (kind, line) in [("unstable", &ev.unstable), ("stable", &ev.stable)] {
                for (i, q) in line.points.iter().enumerate() {
                    w.write_record([kind.into(), i.to_string(), q[0].to_string(), q[1].to_string(), String::new()]).context("csv")?;
                }
            }
            for (i, c) in ev.crossings.iter().enumerate() {
                w.write_record(["crossing".into(), i.to_string(), c.point[0].to_string(), c.point[1].to_string(), c.angle.to_string()]).context("csv")?;
            }
            write_file(&out, &w.into_inner().context("csv")?)?;
        }
        Command::Figure { name, out, ppm } => {
            let fp = figure_preset(&name).map_err(CliError::from)?;
            let model = Model::new(fp.params, fp.functions.clone());
            let cfg = OrbitConfig { burn: fp.burn, samples: fp.samples, project: true, ..Default::default() };
            let run = iterate_orbit(&model, fp.initial, &cfg);
            orbit_outputs(&run, &out, ppm.as_deref(), &orbit_bounds(fp.params.b), (800, 800))?;
        }
        Command::Sweep { spec, checkpoint, workers, out } => {
            let text = fs::read_to_string(&spec).map_err(|source| CliError::Io { path: spec.clone(), source })?;
            let mut s: SweepSpec = serde_json::from_str(&text).map_err(|e| {
                CliError::Config(crate::ConfigError::Parse { path: spec.clone(), line: e.line(), column: e.column(), message: e.to_string() })
            })?;
            s.output = out;
            s.checkpoint = checkpoint.clone();
            resume_sweep(&s, &checkpoint, workers).map_err(CliError::from)?;
        }
    }
    Ok(())
}

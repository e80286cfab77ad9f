//! Checkpointed parameter-plane sweeps.
//!
//! Cells are grouped into chunks of `chunk_size` consecutive row-major
//! cells. Each finished chunk is written as a tile file whose header is the
//! 16-byte spec hash, so a resumed run only recomputes what is missing and
//! refuses tiles from a different spec.

use crate::circle::{axis_value, scan_cell, tongue_csv_row, Ratio, ScanSettings, TongueCell, TONGUE_CSV_HEADER};
use crate::functions::ModelFunctions;
use crate::hypotheses::sup_log_derivative;
use crate::lyapunov::lyapunov_spectrum;
use crate::model::{Model, ModelParams, PhaseState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const LAMBDA_CSV_HEADER: &str = "p1,p2,lambda1,status";
/// Renormalisation period of Lyapunov cells.
pub const LAMBDA_QR_PERIOD: u32 = 10;
/// `t` coordinate of the fixed initial condition of Lyapunov cells.
pub const LAMBDA_T0: f64 = 0.5;

const RECORD_LEN: u32 = 17;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep spec: {0}")]
    SpecInvalid(String),
    #[error("tile {chunk} was written for spec {found}, current spec is {expected}")]
    SpecMismatch { chunk: usize, expected: String, found: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quantity {
    Rho,
    Lambda1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    Alpha2,
    Delta2,
    Eps1,
    Eps2,
}

impl SweepParam {
    pub fn name(self) -> &'static str {
        match self {
            SweepParam::Alpha2 => "alpha2",
            SweepParam::Delta2 => "delta2",
            SweepParam::Eps1 => "eps1",
            SweepParam::Eps2 => "eps2",
        }
    }

    fn set(self, p: &mut ModelParams, v: f64) {
        match self {
            SweepParam::Alpha2 => p.alpha2 = v,
            SweepParam::Delta2 => p.delta2 = v,
            SweepParam::Eps1 => p.eps1 = v,
            SweepParam::Eps2 => p.eps2 = v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Axis {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        axis_value(self.lo, self.hi, self.n, i)
    }
}

fn default_q_max() -> u32 {
    crate::circle::DEFAULT_Q_MAX
}

/// `p1` is the fast (column) axis of the row-major output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub quantity: Quantity,
    pub p1: Axis,
    pub p2: Axis,
    pub params: ModelParams,
    #[serde(default)]
    pub functions: ModelFunctions,
    /// Iterations per cell.
    pub budget: u64,
    pub chunk_size: usize,
    #[serde(default = "default_q_max")]
    pub q_max: u32,
    #[serde(default)]
    pub output: PathBuf,
    #[serde(default)]
    pub checkpoint: PathBuf,
}

#[derive(Serialize)]
struct HashedFields<'a> {
    quantity: Quantity,
    p1: &'a Axis,
    p2: &'a Axis,
    params: &'a ModelParams,
    functions: &'a ModelFunctions,
    budget: u64,
    chunk_size: usize,
    q_max: u32,
}

/// Outcome of one cell as stored in tiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult {
    pub value: f64,
    /// Rho: 1 valid, 0 invalid (H5 fails). Lambda: 0 ok, 1 escaped.
    pub status: u8,
    pub lock: Option<Ratio>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTile {
    pub chunk: usize,
    pub hash: [u8; 16],
    pub cells: Vec<CellResult>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SweepSummary {
    pub cells: usize,
    pub chunks: usize,
    pub computed_chunks: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |m: String| Err(SweepError::SpecInvalid(m));
        if self.p1.param == self.p2.param {
            return bad(format!("both axes sweep {}", self.p1.param.name()));
        }
        for a in [&self.p1, &self.p2] {
            if a.n < 1 {
                return bad(format!("axis {} has n = 0", a.param.name()));
            }
            if !a.lo.is_finite() || !a.hi.is_finite() {
                return bad(format!("axis {} bounds are not finite", a.param.name()));
            }
        }
        if self.budget < 100 {
            return bad(format!("budget {} < 100", self.budget));
        }
        if self.chunk_size < 1 {
            return bad("chunk_size must be at least 1".into());
        }
        if self.q_max < 1 {
            return bad("q_max must be at least 1".into());
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.p1.n * self.p2.n
    }

    pub fn chunk_count(&self) -> usize {
        self.cell_count().div_ceil(self.chunk_size)
    }

    /// First 16 bytes of SHA-256 over the canonical JSON of every field
    /// that affects results. Paths are excluded.
    pub fn hash(&self) -> [u8; 16] {
        let view = HashedFields {
            quantity: self.quantity,
            p1: &self.p1,
            p2: &self.p2,
            params: &self.params,
            functions: &self.functions,
            budget: self.budget,
            chunk_size: self.chunk_size,
            q_max: self.q_max,
        };
        let bytes = serde_json::to_vec(&view).expect("spec serialises");
        let digest = Sha256::digest(&bytes);
        let mut h = [0u8; 16];
        h.copy_from_slice(&digest[..16]);
        h
    }

    /// Parameters of cell `(i, j)`.
    pub fn cell_params(&self, i: usize, j: usize) -> ModelParams {
        let mut p = self.params;
        self.p1.param.set(&mut p, self.p1.value(i));
        self.p2.param.set(&mut p, self.p2.value(j));
        p
    }

    pub fn scan_settings(&self) -> ScanSettings {
        ScanSettings { q_max: self.q_max, burn: self.budget / 10, iters: self.budget, t0: 0.0 }
    }

    /// Fixed initial condition of Lyapunov cells: the middle of the domain.
    pub fn lambda_start(&self, p: &ModelParams) -> PhaseState {
        PhaseState::new(std::f64::consts::PI, 1.0 + p.b / 2.0, LAMBDA_T0)
    }

    fn tile_path(&self, dir: &Path, chunk: usize) -> PathBuf {
        dir.join(format!("tile_{chunk:06}.bin"))
    }
}

fn hex(h: &[u8; 16]) -> String {
    h.iter().map(|b| format!("{b:02x}")).collect()
}

struct CellContext {
    sup: f64,
}

fn compute_cell(spec: &SweepSpec, ctx: &CellContext, k: usize) -> CellResult {
    let (i, j) = (k % spec.p1.n, k / spec.p1.n);
    let p = spec.cell_params(i, j);
    match spec.quantity {
        Quantity::Rho => {
            let c = scan_cell(&spec.functions.psi3, ctx.sup, p.alpha2, p.delta2, &spec.scan_settings());
            CellResult { value: c.rho, status: c.valid as u8, lock: c.locked }
        }
        Quantity::Lambda1 => {
            let model = Model::new(p, spec.functions.clone());
            let e = lyapunov_spectrum(&model, spec.lambda_start(&p), spec.budget, LAMBDA_QR_PERIOD);
            CellResult { value: e.exponents[0], status: e.escaped_at.is_some() as u8, lock: None }
        }
    }
}

fn encode_tile(t: &SweepTile) -> Vec<u8> {
    let mut out = Vec::with_capacity(32 + t.cells.len() * (4 + RECORD_LEN as usize));
    out.extend_from_slice(&t.hash);
    out.extend_from_slice(&(t.chunk as u64).to_le_bytes());
    out.extend_from_slice(&(t.cells.len() as u64).to_le_bytes());
    for c in &t.cells {
        out.extend_from_slice(&RECORD_LEN.to_le_bytes());
        out.extend_from_slice(&c.value.to_bits().to_le_bytes());
        out.push(c.status);
        let (p, q) = c.lock.map_or((0u32, 0u32), |r| (r.p, r.q));
        out.extend_from_slice(&p.to_le_bytes());
        out.extend_from_slice(&q.to_le_bytes());
    }
    out
}

fn decode_tile(bytes: &[u8]) -> Option<SweepTile> {
    let take = |pos: &mut usize, n: usize| -> Option<&[u8]> {
        let s = bytes.get(*pos..*pos + n)?;
        *pos += n;
        Some(s)
    };
    let mut pos = 0;
    let hash: [u8; 16] = take(&mut pos, 16)?.try_into().ok()?;
    let chunk = u64::from_le_bytes(take(&mut pos, 8)?.try_into().ok()?) as usize;
    let count = u64::from_le_bytes(take(&mut pos, 8)?.try_into().ok()?) as usize;
    let mut cells = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        let len = u32::from_le_bytes(take(&mut pos, 4)?.try_into().ok()?);
        if len != RECORD_LEN {
            return None;
        }
        let rec = take(&mut pos, len as usize)?;
        let value = f64::from_bits(u64::from_le_bytes(rec[0..8].try_into().ok()?));
        let status = rec[8];
        let p = u32::from_le_bytes(rec[9..13].try_into().ok()?);
        let q = u32::from_le_bytes(rec[13..17].try_into().ok()?);
        cells.push(CellResult { value, status, lock: (q > 0).then_some(Ratio { p, q }) });
    }
    (pos == bytes.len()).then_some(SweepTile { chunk, hash, cells })
}

fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// Reads the tile of `chunk`; `Ok(None)` if it is absent or unreadable.
pub fn read_tile(spec: &SweepSpec, dir: &Path, chunk: usize) -> Result<Option<SweepTile>, SweepError> {
    let bytes = match fs::read(spec.tile_path(dir, chunk)) {
        Ok(b) => b,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let Some(tile) = decode_tile(&bytes) else { return Ok(None) };
    let expected = spec.hash();
    if tile.hash != expected {
        return Err(SweepError::SpecMismatch { chunk, expected: hex(&expected), found: hex(&tile.hash) });
    }
    let want = spec.chunk_size.min(spec.cell_count() - chunk * spec.chunk_size);
    Ok((tile.chunk == chunk && tile.cells.len() == want).then_some(tile))
}

fn pool(workers: usize) -> Result<rayon::ThreadPool, SweepError> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| SweepError::Io(std::io::Error::other(e)))
}

/// Computes and writes the tiles of `chunks`.
pub fn compute_chunks(spec: &SweepSpec, dir: &Path, chunks: &[usize], workers: usize) -> Result<(), SweepError> {
    spec.validate()?;
    fs::create_dir_all(dir)?;
    let ctx = CellContext { sup: sup_log_derivative(&spec.functions.psi3) };
    let hash = spec.hash();
    let total = spec.cell_count();
    pool(workers)?.install(|| {
        chunks.par_iter().try_for_each(|&chunk| -> Result<(), SweepError> {
            let start = chunk * spec.chunk_size;
            let end = (start + spec.chunk_size).min(total);
            if start >= end {
                return Err(SweepError::SpecInvalid(format!("chunk {chunk} is out of range")));
            }
            let cells = (start..end).map(|k| compute_cell(spec, &ctx, k)).collect();
            let tile = SweepTile { chunk, hash, cells };
            write_atomic(&spec.tile_path(dir, chunk), &encode_tile(&tile))?;
            Ok(())
        })
    })
}

fn csv_row(spec: &SweepSpec, k: usize, c: &CellResult) -> String {
    let (i, j) = (k % spec.p1.n, k / spec.p1.n);
    match spec.quantity {
        Quantity::Rho => {
            let p = spec.cell_params(i, j);
            tongue_csv_row(&TongueCell { alpha2: p.alpha2, delta2: p.delta2, rho: c.value, locked: c.lock, valid: c.status == 1 })
        }
        Quantity::Lambda1 => {
            let status = if c.status == 0 { "ok" } else { "escaped" };
            format!("{},{},{},{}", spec.p1.value(i), spec.p2.value(j), c.value, status)
        }
    }
}

/// Writes the final CSV from a complete set of tiles.
pub fn assemble(spec: &SweepSpec, dir: &Path) -> Result<(), SweepError> {
    let mut out = String::new();
    out.push_str(match spec.quantity {
        Quantity::Rho => TONGUE_CSV_HEADER,
        Quantity::Lambda1 => LAMBDA_CSV_HEADER,
    });
    out.push('\n');
    for chunk in 0..spec.chunk_count() {
        let tile = read_tile(spec, dir, chunk)?
            .ok_or_else(|| SweepError::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("tile {chunk} missing"))))?;
        for (off, c) in tile.cells.iter().enumerate() {
            out.push_str(&csv_row(spec, chunk * spec.chunk_size + off, c));
            out.push('\n');
        }
    }
    if let Some(parent) = spec.output.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_atomic(&spec.output, out.as_bytes())?;
    Ok(())
}

/// Computes every chunk from scratch into `spec.checkpoint`, then writes `spec.output`.
pub fn run_sweep(spec: &SweepSpec, workers: usize) -> Result<SweepSummary, SweepError> {
    spec.validate()?;
    let all: Vec<usize> = (0..spec.chunk_count()).collect();
    compute_chunks(spec, &spec.checkpoint, &all, workers)?;
    assemble(spec, &spec.checkpoint)?;
    Ok(SweepSummary { cells: spec.cell_count(), chunks: all.len(), computed_chunks: all.len() })
}

/// Like [`run_sweep`] but keeps every valid tile already in `dir`.
pub fn resume_sweep(spec: &SweepSpec, dir: &Path, workers: usize) -> Result<SweepSummary, SweepError> {
    spec.validate()?;
    let mut missing = Vec::new();
    for chunk in 0..spec.chunk_count() {
        if read_tile(spec, dir, chunk)?.is_none() {
            missing.push(chunk);
        }
    }
    compute_chunks(spec, dir, &missing, workers)?;
    assemble(spec, dir)?;
    Ok(SweepSummary { cells: spec.cell_count(), chunks: spec.chunk_count(), computed_chunks: missing.len() })
}

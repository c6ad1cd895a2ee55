//! Binary snapshot files.
//!
//! Layout, all little-endian: magic `SQGS`, format version (u32), `n` (u32),
//! `alpha`, `kappa`, `time` (f64 each), then `n²` pairs `(re, im)` of f64 in
//! storage order: row-major, `ξ₁` fastest, each axis in FFT order
//! `0, 1, …, n/2−1, −n/2, …, −1`.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Result, SqgError};
use crate::evolution::Snapshot;
use crate::spectral::{GridSpec, SpectralField};

pub const MAGIC: &[u8; 4] = b"SQGS";
pub const FORMAT_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 4 + 8 * 3;

/// Contents of a snapshot file.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotFile {
    pub alpha: f64,
    pub kappa: f64,
    pub time: f64,
    pub theta: SpectralField,
}

impl SnapshotFile {
    pub fn into_snapshot(self) -> Snapshot {
        Snapshot {
            time: self.time,
            theta: self.theta,
            config_hash: None,
        }
    }
}

pub fn encode_snapshot(snap: &Snapshot, alpha: f64, kappa: f64) -> Vec<u8> {
    let n = snap.theta.grid().n();
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * n * n);
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    buf.extend_from_slice(&(n as u32).to_le_bytes());
    for v in [alpha, kappa, snap.time] {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    for c in snap.theta.coeffs() {
        buf.extend_from_slice(&c.re.to_le_bytes());
        buf.extend_from_slice(&c.im.to_le_bytes());
    }
    buf
}

pub fn decode_snapshot(bytes: &[u8]) -> Result<SnapshotFile> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(SqgError::Format("bad magic, not a snapshot file".into()));
    }
    if bytes.len() < HEADER_LEN {
        return Err(SqgError::Format(format!("truncated header: {} bytes", bytes.len())));
    }
    let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let f64_at = |i: usize| f64::from_le_bytes(bytes[i..i + 8].try_into().expect("8 bytes"));
    let version = u32_at(4);
    if version != FORMAT_VERSION {
        return Err(SqgError::Format(format!(
            "unsupported version {version}, expected {FORMAT_VERSION}"
        )));
    }
    let n = u32_at(8) as usize;
    let grid = GridSpec::new(n).map_err(|e| SqgError::Format(format!("bad grid size: {e}")))?;
    let (alpha, kappa, time) = (f64_at(12), f64_at(20), f64_at(28));
    let expected = HEADER_LEN + 16 * n * n;
    if bytes.len() != expected {
        return Err(SqgError::Format(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    if !(time >= 0.0 && time.is_finite()) {
        return Err(SqgError::Format(format!("invalid time {time}")));
    }
    let coeffs = bytes[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| {
            Complex64::new(
                f64::from_le_bytes(c[..8].try_into().expect("8 bytes")),
                f64::from_le_bytes(c[8..].try_into().expect("8 bytes")),
            )
        })
        .collect();
    Ok(SnapshotFile {
        alpha,
        kappa,
        time,
        theta: SpectralField::from_coeffs(grid, coeffs)?,
    })
}

pub fn save_snapshot(path: &Path, snap: &Snapshot, alpha: f64, kappa: f64) -> Result<()> {
    fs::write(path, encode_snapshot(snap, alpha, kappa)).map_err(|e| SqgError::io(path, e))
}

pub fn load_snapshot(path: &Path) -> Result<SnapshotFile> {
    let bytes = fs::read(path).map_err(|e| SqgError::io(path, e))?;
    decode_snapshot(&bytes)
}

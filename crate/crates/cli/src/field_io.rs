//! UHF1 field files.
//!
//! ```text
//! UHF1\n
//! {"signature":{..},"surface":"n","sizes":[..],"period_scale":1,"kind":"spectral","real_symmetric":true,"count":N}\n
//! <N × (re, im) little-endian f64>
//! ```
//!
//! Values are stored row-major in the lattice's axis order: grid points for
//! `grid` files, FFT-ordered coefficients for `spectral` files.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;
use ultrawave_core::{FreqLattice, GridField, SignatureSpec, SpectralField, Surface};

pub const MAGIC: &[u8] = b"UHF1";

// Hermitian check applied when a spectral file claims real symmetry.
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FieldIoError {
    #[error("unsupported format: expected magic UHF1, found {0:?}")]
    UnsupportedFormat(String),

    #[error("malformed header: {0}")]
    Header(String),

    #[error("header count mismatch: header says {header}, lattice has {lattice} values")]
    CountMismatch { header: usize, lattice: usize },

    #[error("payload length mismatch: expected {expected} bytes, found {got}")]
    PayloadLength { expected: usize, got: usize },

    #[error("field flagged real but {0}")]
    NotReal(String),

    #[error(transparent)]
    Lattice(#[from] ultrawave_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Grid,
    Spectral,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FieldData {
    Grid(GridField),
    Spectral(SpectralField),
}

impl FieldData {
    pub fn kind(&self) -> FieldKind {
        match self {
            FieldData::Grid(_) => FieldKind::Grid,
            FieldData::Spectral(_) => FieldKind::Spectral,
        }
    }

    pub fn lattice(&self) -> &Arc<FreqLattice> {
        match self {
            FieldData::Grid(g) => g.lattice(),
            FieldData::Spectral(s) => s.lattice(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        match self {
            FieldData::Grid(g) => g.values(),
            FieldData::Spectral(s) => s.coeffs(),
        }
    }

    pub fn real_symmetric(&self) -> bool {
        match self {
            FieldData::Grid(g) => g.values().iter().all(|v| v.im == 0.0),
            FieldData::Spectral(s) => s.is_real_symmetric(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct Header {
    signature: SignatureSpec,
    #[serde(default = "default_surface")]
    surface: Surface,
    sizes: Vec<usize>,
    #[serde(default = "default_scale")]
    period_scale: u32,
    kind: FieldKind,
    real_symmetric: bool,
    count: usize,
}

fn default_surface() -> Surface {
    Surface::N
}

fn default_scale() -> u32 {
    1
}

pub fn encode(field: &FieldData) -> Vec<u8> {
    let lat = field.lattice();
    let header = Header {
        signature: lat.signature(),
        surface: lat.surface(),
        sizes: lat.sizes().to_vec(),
        period_scale: lat.period_scale(),
        kind: field.kind(),
        real_symmetric: field.real_symmetric(),
        count: lat.len(),
    };
    let json = serde_json::to_string(&header).expect("header serializes");
    let mut out = Vec::with_capacity(MAGIC.len() + json.len() + 2 + 16 * lat.len());
    out.extend_from_slice(MAGIC);
    out.push(b'\n');
    out.extend_from_slice(json.as_bytes());
    out.push(b'\n');
    for v in field.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        out.extend_from_slice(&v.im.to_le_bytes());
    }
    out
}

fn split_line(bytes: &[u8]) -> Option<(&[u8], &[u8])> {
    let at = bytes.iter().position(|&b| b == b'\n')?;
    Some((&bytes[..at], &bytes[at + 1..]))
}

pub fn decode(bytes: &[u8]) -> Result<FieldData, FieldIoError> {
    let rest = match split_line(bytes) {
        Some((m, r)) if m == MAGIC => r,
        _ => {
            let head = &bytes[..bytes.len().min(4)];
            return Err(FieldIoError::UnsupportedFormat(String::from_utf8_lossy(head).into_owned()));
        }
    };
    let (line, payload) =
        split_line(rest).ok_or_else(|| FieldIoError::Header("no header line".into()))?;
    let header: Header =
        serde_json::from_slice(line).map_err(|e| FieldIoError::Header(e.to_string()))?;

    let lattice = match header.surface {
        Surface::N => FreqLattice::new(header.signature, &header.sizes)?,
        Surface::M => FreqLattice::hypersurface(header.signature, &header.sizes)?,
    };
    let lattice = Arc::new(lattice.with_period_scale(header.period_scale)?);
    if header.count != lattice.len() {
        return Err(FieldIoError::CountMismatch {
            header: header.count,
            lattice: lattice.len(),
        });
    }
    let expected = 16 * header.count;
    if payload.len() != expected {
        return Err(FieldIoError::PayloadLength {
            expected,
            got: payload.len(),
        });
    }
    let f = |b: &[u8]| f64::from_le_bytes(b.try_into().expect("8 bytes"));
    let values: Vec<Complex64> = payload
        .chunks_exact(16)
        .map(|c| Complex64::new(f(&c[..8]), f(&c[8..])))
        .collect();

    match header.kind {
        FieldKind::Grid => {
            if header.real_symmetric && values.iter().any(|v| v.im != 0.0) {
                return Err(FieldIoError::NotReal("grid values have imaginary parts".into()));
            }
            Ok(FieldData::Grid(GridField::new(lattice, values)?))
        }
        FieldKind::Spectral => {
            let mut s = SpectralField::new(lattice, values)?;
            if header.real_symmetric {
                s = s
                    .assert_real_symmetric(SYMMETRY_TOL)
                    .map_err(|e| FieldIoError::NotReal(e.to_string()))?;
            }
            Ok(FieldData::Spectral(s))
        }
    }
}

pub fn read_field(path: &Path) -> Result<FieldData, FieldIoError> {
    let bytes = fs::read(path).map_err(|source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    })?;
    decode(&bytes)
}

pub fn write_field(path: &Path, field: &FieldData) -> Result<(), FieldIoError> {
    crate::report::write_atomic(path, &encode(field)).map_err(|source| FieldIoError::Io {
        path: path.display().to_string(),
        source,
    })
}

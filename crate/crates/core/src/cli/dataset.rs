//! Binary field datasets.
//!
//! ```text
//! "RWF1" | u32 version | u64 n_time | u64 n_space | f64 dt_sample |
//! f64 domain_length | u64 provenance length | provenance (UTF-8) |
//! n_time × n_space × (f64 re, f64 im)
//! ```
//!
//! All little-endian. The series start time travels in the provenance as
//! `t0=<value>`.

use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::nls::{with_t0_entry, FieldSeries, Grid};

pub const DATASET_MAGIC: &[u8; 4] = b"RWF1";
pub const DATASET_VERSION: u32 = 1;
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8 + 8 + 8;

pub fn dataset_bytes(series: &FieldSeries) -> Vec<u8> {
    let provenance = with_t0_entry(series.provenance(), series.t0());
    let n_space = series.grid().len();
    let mut out = Vec::with_capacity(HEADER_LEN + provenance.len() + series.len() * n_space * 16);
    out.extend_from_slice(DATASET_MAGIC);
    out.extend_from_slice(&DATASET_VERSION.to_le_bytes());
    out.extend_from_slice(&(series.len() as u64).to_le_bytes());
    out.extend_from_slice(&(n_space as u64).to_le_bytes());
    out.extend_from_slice(&series.dt_sample().to_le_bytes());
    out.extend_from_slice(&series.grid().length().to_le_bytes());
    out.extend_from_slice(&(provenance.len() as u64).to_le_bytes());
    out.extend_from_slice(provenance.as_bytes());
    for frame in series.frames() {
        for v in frame {
            out.extend_from_slice(&v.re.to_le_bytes());
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

fn u64_at(bytes: &[u8], at: usize) -> u64 {
    u64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().unwrap())
}

pub fn dataset_from_bytes(bytes: &[u8]) -> Result<FieldSeries> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "dataset header needs {HEADER_LEN} bytes, file has {}",
            bytes.len()
        )));
    }
    if &bytes[..4] != DATASET_MAGIC {
        return Err(Error::Format(format!("bad dataset magic {:?}", &bytes[..4])));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != DATASET_VERSION {
        return Err(Error::Format(format!(
            "dataset version {version}, this build reads {DATASET_VERSION}"
        )));
    }
    let n_time = u64_at(bytes, 8);
    let n_space = u64_at(bytes, 16);
    let dt_sample = f64_at(bytes, 24);
    let length = f64_at(bytes, 32);
    let prov_len = u64_at(bytes, 40);
    let expected = (n_time as u128) * (n_space as u128) * 16 + prov_len as u128 + HEADER_LEN as u128;
    if expected != bytes.len() as u128 {
        return Err(Error::Format(format!(
            "dataset declares {n_time}x{n_space} samples and {prov_len} provenance bytes: \
             expected {expected} bytes, found {}",
            bytes.len()
        )));
    }
    let (n_time, n_space, prov_len) = (n_time as usize, n_space as usize, prov_len as usize);
    let prov_end = HEADER_LEN + prov_len;
    let provenance = std::str::from_utf8(&bytes[HEADER_LEN..prov_end])
        .map_err(|e| Error::Format(format!("provenance is not UTF-8: {e}")))?
        .to_string();
    let grid = Grid::new(n_space, length).map_err(|e| Error::Format(format!("dataset grid: {e}")))?;
    let mut frames = Vec::with_capacity(n_time);
    let mut at = prov_end;
    for _ in 0..n_time {
        let frame: Vec<Complex64> = (0..n_space)
            .map(|i| Complex64::new(f64_at(bytes, at + 16 * i), f64_at(bytes, at + 16 * i + 8)))
            .collect();
        at += 16 * n_space;
        frames.push(frame);
    }
    let t0 = match provenance
        .split(';')
        .filter_map(|kv| kv.split_once('='))
        .find(|(k, _)| k.trim() == "t0")
    {
        Some((_, v)) => v
            .trim()
            .parse::<f64>()
            .map_err(|_| Error::Format(format!("provenance t0 `{v}` is not a number")))?,
        None => 0.0,
    };
    FieldSeries::new(grid, t0, dt_sample, frames, provenance).map_err(|e| Error::Format(format!("dataset header: {e}")))
}

pub fn write_dataset(series: &FieldSeries, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, dataset_bytes(series)).map_err(|e| Error::io(path, e))
}

pub fn read_dataset(path: impl AsRef<Path>) -> Result<FieldSeries> {
    let path = path.as_ref();
    dataset_from_bytes(&std::fs::read(path).map_err(|e| Error::io(path, e))?)
}

//! Right-hand sides: the reference vector, seeded random vectors and binary files.
//!
//! File layout: 8-byte magic `HHFFTRHS`, `u32` dimension count, `u32`
//! reserved (zero), then `N` little-endian `(re, im)` pairs of `f64` in
//! lexicographic order with `x_1` slowest.

use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RhsSpec;
use crate::error::{CliError, Result};

pub const MAGIC: &[u8; 8] = b"HHFFTRHS";
const HEADER_LEN: usize = 16;

/// `0.01` on the first `n1` entries, `1` elsewhere.
pub fn paper_rhs(n1: usize, len: usize) -> Vec<C64> {
    (0..len)
        .map(|i| C64::new(if i < n1 { 0.01 } else { 1.0 }, 0.0))
        .collect()
}

/// Entries with real and imaginary parts uniform in `[-1, 1)`.
pub fn random_rhs(seed: u64, len: usize) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len)
        .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn build_rhs(spec: &RhsSpec, dims: &[usize]) -> Result<Vec<C64>> {
    let len = dims.iter().product();
    match spec {
        RhsSpec::Paper => Ok(paper_rhs(dims[0], len)),
        RhsSpec::Random(seed) => Ok(random_rhs(*seed, len)),
        RhsSpec::File(path) => read_rhs_file(path, dims.len(), len),
    }
}

pub fn write_rhs_file(path: &Path, d: usize, values: &[C64]) -> Result<()> {
    let mut buf = Vec::with_capacity(HEADER_LEN + 16 * values.len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&(d as u32).to_le_bytes());
    buf.extend_from_slice(&0u32.to_le_bytes());
    for z in values {
        buf.extend_from_slice(&z.re.to_le_bytes());
        buf.extend_from_slice(&z.im.to_le_bytes());
    }
    let mut file = std::fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    file.write_all(&buf).map_err(|e| CliError::io(path, e))
}

pub fn read_rhs_file(path: &Path, d: usize, len: usize) -> Result<Vec<C64>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CliError::io(path, e))?;
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(bad("missing HHFFTRHS header".into()));
    }
    let file_d = u32::from_le_bytes(bytes[8..12].try_into().expect("4 bytes")) as usize;
    if file_d != d {
        return Err(bad(format!("file is for d = {file_d}, run has d = {d}")));
    }
    let body = &bytes[HEADER_LEN..];
    if body.len() != 16 * len {
        return Err(bad(format!(
            "expected {len} complex values ({} bytes), found {} bytes",
            16 * len,
            body.len()
        )));
    }
    Ok(body
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
            let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
            C64::new(re, im)
        })
        .collect())
}

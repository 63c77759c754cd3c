//! Field snapshot serialization.
//!
//! Binary layout (all little-endian): `u32` dimension, `u32` points per
//! axis, `f64` box side length, then `n^d` `f64` samples row-major.
//! CSV output is provided for small grids only.

use super::{GridSpec, RealField};
use crate::error::{Result, WaveError};
use std::io::Write;
use std::path::Path;

/// Largest grid serialized as CSV.
pub const MAX_CSV_POINTS: usize = 1 << 16;

/// Write bytes to `path` atomically (write to a sibling temp file, then
/// rename); no partial file is ever visible.
pub fn atomic_write(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp_path = std::path::PathBuf::from(tmp);
    std::fs::create_dir_all(dir)?;
    {
        let mut f = std::fs::File::create(&tmp_path)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp_path, path)?;
    Ok(())
}

pub fn write_binary(field: &RealField, path: &Path) -> Result<()> {
    let g = field.grid();
    let mut bytes = Vec::with_capacity(16 + 8 * field.samples().len());
    bytes.extend_from_slice(&(g.dim() as u32).to_le_bytes());
    bytes.extend_from_slice(&(g.n() as u32).to_le_bytes());
    bytes.extend_from_slice(&g.box_len().to_le_bytes());
    for v in field.samples() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    atomic_write(path, &bytes)
}

pub fn read_binary(path: &Path) -> Result<RealField> {
    let bytes = std::fs::read(path)?;
    if bytes.len() < 16 {
        return Err(WaveError::Structural(format!("{}: truncated header", path.display())));
    }
    let dim = u32::from_le_bytes(bytes[0..4].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let box_len = f64::from_le_bytes(bytes[8..16].try_into().unwrap());
    let grid = GridSpec::new(dim, n, box_len)?;
    let expect = 16 + 8 * grid.points();
    if bytes.len() != expect {
        return Err(WaveError::Structural(format!(
            "{}: {} bytes, expected {expect}",
            path.display(),
            bytes.len()
        )));
    }
    let samples: Vec<f64> = bytes[16..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    RealField::from_samples(grid, samples)
}

/// CSV dump `i0,...,i{d-1},value` with a header row; small grids only.
pub fn write_csv(field: &RealField, path: &Path) -> Result<()> {
    let g = field.grid();
    if g.points() > MAX_CSV_POINTS {
        return Err(WaveError::Domain(format!(
            "grid of {} points exceeds the CSV cap {MAX_CSV_POINTS}",
            g.points()
        )));
    }
    let mut out = String::new();
    for a in 0..g.dim() {
        out.push_str(&format!("i{a},"));
    }
    out.push_str("value\n");
    for (flat, v) in field.samples().iter().enumerate() {
        for a in 0..g.dim() {
            out.push_str(&format!("{},", g.axis_index(flat, a)));
        }
        out.push_str(&format!("{v:.17e}\n"));
    }
    atomic_write(path, out.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random_real_field;

    #[test]
    fn binary_roundtrip_is_exact() {
        let g = GridSpec::new(2, 16, 2.5).unwrap();
        let f = random_real_field(g, 99);
        let dir = std::env::temp_dir().join("wavecrit-io-test");
        let path = dir.join("field.bin");
        write_binary(&f, &path).unwrap();
        let back = read_binary(&path).unwrap();
        assert_eq!(back.grid(), f.grid());
        assert_eq!(back.samples(), f.samples());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn csv_has_header_and_rows() {
        let g = GridSpec::new(1, 8, 1.0).unwrap();
        let f = random_real_field(g, 1);
        let dir = std::env::temp_dir().join("wavecrit-io-test-csv");
        let path = dir.join("field.csv");
        write_csv(&f, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "i0,value");
        assert_eq!(lines.len(), 9);
        std::fs::remove_dir_all(&dir).ok();
    }
}

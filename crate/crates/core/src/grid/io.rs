use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Axis, Grid2D, TensorGrid};
use crate::error::{Error, Result};

/// JSON sidecar written next to a binary grid snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridHeader {
    pub dims: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub spacing: f64,
    pub mass: f64,
    pub layout: String,
}

/// Writes `path` (binary) and `path` with a `.json` extension (sidecar).
///
/// Binary layout, all little-endian 64-bit: dims (u64), half width (f64),
/// points per axis (u64), then the values row-major as f64.
pub fn write_grid<const D: usize>(grid: &TensorGrid<D>, path: &Path) -> Result<GridHeader> {
    let axis = grid.axis();
    let mut out = BufWriter::new(File::create(path)?);
    out.write_all(&(D as u64).to_le_bytes())?;
    out.write_all(&axis.half_width().to_le_bytes())?;
    out.write_all(&(axis.points() as u64).to_le_bytes())?;
    for v in grid.values() {
        out.write_all(&v.to_le_bytes())?;
    }
    out.flush()?;

    let header = GridHeader {
        dims: D,
        half_width: axis.half_width(),
        points_per_axis: axis.points(),
        spacing: axis.spacing(),
        mass: grid.mass(),
        layout: "row-major f64 little-endian after 24-byte header".into(),
    };
    std::fs::write(path.with_extension("json"), serde_json::to_string_pretty(&header)?)?;
    Ok(header)
}

pub fn read_grid<const D: usize>(path: &Path) -> Result<TensorGrid<D>> {
    let mut bytes = Vec::new();
    File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 24 || (bytes.len() - 24) % 8 != 0 {
        return Err(Error::Format(format!("{} bytes is not a valid grid file", bytes.len())));
    }
    let word = |k: usize| -> [u8; 8] { bytes[8 * k..8 * k + 8].try_into().expect("8-byte slice") };
    let dims = u64::from_le_bytes(word(0)) as usize;
    if dims != D {
        return Err(Error::Format(format!("file holds a {dims}-D grid, expected {D}-D")));
    }
    let half_width = f64::from_le_bytes(word(1));
    let points = u64::from_le_bytes(word(2)) as usize;
    let axis = Axis::new(half_width, points).map_err(|e| Error::Format(e.to_string()))?;
    let values: Vec<f64> = bytes[24..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    TensorGrid::from_values(axis, values).map_err(|e| Error::Format(e.to_string()))
}

/// CSV of the 1-D slice at first-coordinate index `row`: columns `v,f`.
pub fn write_csv_slice(grid: &Grid2D, row: usize, path: &Path) -> Result<()> {
    let axis = grid.axis();
    let n = axis.points();
    if row >= n {
        return Err(Error::InvalidInput(format!("row {row} out of range 0..{n}")));
    }
    let mut out = BufWriter::new(File::create(path)?);
    writeln!(out, "v,f")?;
    for (j, v) in axis.nodes().iter().enumerate() {
        writeln!(out, "{:.16e},{:.16e}", v, grid.values()[row * n + j])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid3D;

    #[test]
    fn round_trip_binary() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let g = Grid2D::from_fn(Axis::new(3.0, 7).unwrap(), |v| v[0] - 2.0 * v[1] + 0.1);
        let header = write_grid(&g, &path).unwrap();
        assert_eq!(header.points_per_axis, 7);
        assert_eq!(std::fs::metadata(&path).unwrap().len(), 24 + 49 * 8);
        assert_eq!(read_grid::<2>(&path).unwrap(), g);
        assert!(read_grid::<3>(&path).is_err());
        assert!(path.with_extension("json").exists());
    }

    #[test]
    fn rejects_truncated_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.bin");
        write_grid(&Grid3D::zeros(Axis::new(1.0, 3).unwrap()), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 8]).unwrap();
        assert!(matches!(read_grid::<3>(&path), Err(Error::Format(_))));
    }

    #[test]
    fn csv_slice() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.csv");
        let g = Grid2D::from_fn(Axis::new(1.0, 3).unwrap(), |v| v[1]);
        write_csv_slice(&g, 1, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.starts_with("v,f\n"));
    }
}

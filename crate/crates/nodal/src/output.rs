//! Artifact writers: CSV tables with fixed float formatting, flat binary grid
//! dumps and OFF meshes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nodal_core::field::GridSpec;
use nodal_core::topology::TriangleMesh;
use serde::Serialize;

use crate::error::{CliError, Result};

/// Seventeen significant digits, enough to round-trip every `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// A CSV table held in memory until the run succeeds.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Appended to the run stem, e.g. `""` or `".oracle"`.
    pub suffix: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(suffix: &str, header: &[&str]) -> Self {
        Self { suffix: suffix.to_owned(), header: header.iter().map(|h| (*h).to_owned()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Where the files of one run go: `<dir>/<stem><suffix>.<ext>`.
#[derive(Debug, Clone)]
pub struct RunFiles {
    pub dir: PathBuf,
    pub stem: String,
    written: Vec<PathBuf>,
}

impl RunFiles {
    pub fn new(dir: &Path, stem: String) -> Self {
        Self { dir: dir.to_path_buf(), stem, written: Vec::new() }
    }

    pub fn path(&self, suffix: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}.{ext}", self.stem))
    }

    pub fn manifest_path(&self) -> PathBuf {
        self.path(".manifest", "json")
    }

    /// Files written so far, excluding the manifest.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn create_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.dir).map_err(|e| CliError::io(&self.dir, e))
    }

    fn record(&mut self, path: PathBuf) {
        if !self.written.contains(&path) {
            self.written.push(path);
        }
    }

    pub fn write_bytes(&mut self, suffix: &str, ext: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.path(suffix, ext);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        self.record(path.clone());
        Ok(path)
    }

    pub fn write_json(&mut self, suffix: &str, value: &impl Serialize) -> Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write_bytes(suffix, "json", &bytes)
    }

    pub fn write_table(&mut self, table: &Table) -> Result<PathBuf> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(self.path(&table.suffix, "csv"), e.into_error()))?;
        self.write_bytes(&table.suffix, "csv", &bytes)
    }

    /// Values as little-endian `f64`, axis 0 varying fastest, with a JSON sidecar.
    pub fn write_grid_dump(&mut self, suffix: &str, grid: &GridSpec, values: &[f64], meta: serde_json::Value) -> Result<PathBuf> {
        let bytes: Vec<u8> = values.iter().flat_map(|v| v.to_le_bytes()).collect();
        let path = self.write_bytes(suffix, "f64", &bytes)?;
        let sidecar = serde_json::json!({
            "data": path.file_name().map(|n| n.to_string_lossy().into_owned()),
            "dtype": "f64",
            "endianness": "little",
            "order": "axis 0 varies fastest",
            "shape": vec![grid.resolution; grid.dim()],
            "grid": grid,
            "meta": meta,
        });
        self.write_json(suffix, &sidecar)?;
        Ok(path)
    }

    pub fn write_off(&mut self, suffix: &str, mesh: &TriangleMesh) -> Result<PathBuf> {
        let mut out = Vec::new();
        let io = |e| CliError::io(self.path(suffix, "off"), e);
        writeln!(out, "OFF").map_err(io)?;
        writeln!(out, "{} {} 0", mesh.vertex_count(), mesh.triangles.len()).map_err(io)?;
        for p in mesh.vertices.chunks(3) {
            writeln!(out, "{} {} {}", float(p[0]), float(p[1]), float(p[2])).map_err(io)?;
        }
        for t in &mesh.triangles {
            writeln!(out, "3 {} {} {}", t[0], t[1], t[2]).map_err(io)?;
        }
        self.write_bytes(suffix, "off", &out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        assert_eq!(float(0.1), "1.0000000000000001e-1");
        assert_eq!(float(-2.0), "-2.0000000000000000e0");
        let x = std::f64::consts::PI / 7.0;
        assert_eq!(float(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn tables_and_dumps_land_beside_the_stem() {
        let dir = tempfile::tempdir().unwrap();
        let mut files = RunFiles::new(dir.path(), "run-s1".into());
        let mut t = Table::new(".demo", &["a", "b"]);
        t.push(vec!["1".into(), float(0.5)]);
        let p = files.write_table(&t).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a,b\n1,5.0000000000000000e-1\n");
        let grid = GridSpec::centered(2, 1.0, 3).unwrap();
        let values: Vec<f64> = (0..9).map(f64::from).collect();
        let d = files.write_grid_dump(".g", &grid, &values, serde_json::json!({})).unwrap();
        let bytes = fs::read(d).unwrap();
        assert_eq!(bytes.len(), 72);
        assert_eq!(f64::from_le_bytes(bytes[8..16].try_into().unwrap()), 1.0);
        assert!(files.path(".g", "json").exists());
        assert_eq!(files.written().len(), 3);
    }
}

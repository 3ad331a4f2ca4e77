//! Artifact writers: column CSV with round-trip precision and JSON metadata.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::OdeSettings;

/// Environment variable overriding the default ODE tolerances.
pub const TOLS_ENV: &str = "NDE_LAB_TOLS";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes equal-length columns under a header row.
pub fn write_csv(path: &Path, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
    if headers.len() != columns.len() {
        return Err(Error::InvalidInput("one header per column".into()));
    }
    let rows = columns.first().map_or(0, |c| c.len());
    if columns.iter().any(|c| c.len() != rows) {
        return Err(Error::InvalidInput("columns differ in length".into()));
    }
    let mut out = BufWriter::new(fs::File::create(path)?);
    writeln!(out, "{}", headers.join(","))?;
    for i in 0..rows {
        let line: Vec<String> = columns.iter().map(|c| format_f64(c[i])).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] back into headers and columns.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    let headers: Vec<String> =
        lines.next().ok_or_else(|| Error::InvalidInput("empty CSV".into()))?.split(',').map(str::to_owned).collect();
    let mut cols = vec![Vec::new(); headers.len()];
    for line in lines.filter(|l| !l.is_empty()) {
        for (col, field) in cols.iter_mut().zip(line.split(',')) {
            col.push(field.parse().map_err(|_| Error::InvalidInput(format!("bad number {field:?}")))?);
        }
    }
    Ok((headers, cols))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// ODE settings, with tolerances replaced by `NDE_LAB_TOLS` when set.
pub fn settings_from_env() -> Result<OdeSettings> {
    let base = OdeSettings::default();
    match std::env::var(TOLS_ENV) {
        Ok(v) => {
            let tol: f64 =
                v.trim().parse().map_err(|_| Error::InvalidInput(format!("{TOLS_ENV}={v:?} is not a number")))?;
            if !(tol > 0.0 && tol < 1.0) {
                return Err(Error::InvalidInput(format!("{TOLS_ENV} must lie in (0, 1)")));
            }
            Ok(base.with_tolerance(tol))
        }
        Err(_) => Ok(base),
    }
}

/// Output directory that is created on first use.
#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(Self { root, written: Vec::new() })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn csv(&mut self, name: &str, headers: &[&str], columns: &[&[f64]]) -> Result<()> {
        let p = self.path(name);
        write_csv(&p, headers, columns)?;
        self.written.push(p);
        Ok(())
    }

    pub fn json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<()> {
        let p = self.path(name);
        write_json(&p, value)?;
        self.written.push(p);
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<()> {
        let p = self.path(name);
        fs::write(&p, body)?;
        self.written.push(p);
        Ok(())
    }

    /// Files written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        let x = [0.1, -1.0 / 3.0, f64::MIN_POSITIVE, 1e300, -0.0];
        let y = [std::f64::consts::PI, 2.0, 3.0, 4.0, 5.0];
        write_csv(&p, &["x", "y"], &[&x, &y]).unwrap();
        let (h, cols) = read_csv(&p).unwrap();
        assert_eq!(h, ["x", "y"]);
        for (a, b) in cols[0].iter().zip(&x) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
        assert_eq!(cols[1], y);
    }

    #[test]
    fn csv_rejects_ragged_columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        assert!(write_csv(&p, &["x", "y"], &[&[1.0], &[1.0, 2.0]]).is_err());
        assert!(write_csv(&p, &["x"], &[&[1.0], &[1.0]]).is_err());
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(format_f64(1.0), "1.0000000000000000e0");
    }
}

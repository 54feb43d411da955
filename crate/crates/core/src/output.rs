//! Number formatting and metadata sidecars shared by every emitted dataset.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

pub const TOOL_NAME: &str = "frustra";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Decimal scientific notation with 17 significant digits; round-trips `f64`.
pub fn fmt_f64(x: f64) -> String {
    // normalize −0 so identical runs cannot differ by the sign of zero
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Description of a run, written next to every data file.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Value,
    pub grid: Value,
    /// Spin basis convention used by the ED oracle.
    pub basis_convention: &'static str,
    #[serde(skip_serializing_if = "Value::is_null")]
    pub extra: Value,
}

impl Metadata {
    pub fn new(command: impl Into<String>, params: Value, grid: Value) -> Self {
        Metadata {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.into(),
            params,
            grid,
            basis_convention: "bit j = 1 is spin j down; fermion number M = number of up spins",
            extra: Value::Null,
        }
    }

    pub fn with_extra(mut self, extra: Value) -> Self {
        self.extra = extra;
        self
    }

    /// `data.csv` gets `data.csv.meta.json`.
    pub fn sidecar_path(data: &Path) -> PathBuf {
        let mut name = data.file_name().map(|n| n.to_os_string()).unwrap_or_default();
        name.push(".meta.json");
        data.with_file_name(name)
    }

    pub fn write_sidecar(&self, data: &Path) -> io::Result<PathBuf> {
        let path = Self::sidecar_path(data);
        let mut text = serde_json::to_string_pretty(self).map_err(io::Error::other)?;
        text.push('\n');
        fs::write(&path, text)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 12345.678901234567, std::f64::consts::PI] {
            let s = fmt_f64(x);
            let mantissa = s.split('e').next().unwrap().trim_start_matches('-').replace('.', "");
            assert_eq!(mantissa.len(), 17, "{s}");
            assert_eq!(s.parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt_f64(-0.0), fmt_f64(0.0));
    }

    #[test]
    fn sidecar_name() {
        let p = Metadata::sidecar_path(Path::new("/tmp/out/spectrum.csv"));
        assert_eq!(p, Path::new("/tmp/out/spectrum.csv.meta.json"));
    }
}

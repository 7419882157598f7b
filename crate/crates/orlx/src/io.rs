//! Sample files: CSV (one value per line, row-major) or raw little-endian
//! `f64`, each with a JSON sidecar `<file>.json` holding `{n, L, σ}`.

use std::fs;
use std::path::{Path, PathBuf};

use orlx_core::{Domain, GridFunction, Shift};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Environment variable naming the default directory for relative paths.
pub const DATA_DIR_ENV: &str = "ORLX_DATA_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Bin,
}

impl Format {
    /// `.bin` and `.f64` are binary; everything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("bin" | "f64") => Format::Bin,
            _ => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sidecar {
    pub n: usize,
    #[serde(rename = "L")]
    pub depth: u32,
    /// One-third shift per axis, in thirds.
    pub sigma: Shift,
}

impl Sidecar {
    pub fn domain(&self) -> Result<Domain> {
        Ok(Domain::new(self.n, self.depth)?)
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Resolves a relative path against `ORLX_DATA_DIR` when that is set.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(DATA_DIR_ENV) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn store(f: &GridFunction, sigma: Shift, path: &Path) -> Result<()> {
    match Format::from_path(path) {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
            for v in f.values() {
                w.write_record([v.to_string()])?;
            }
            w.flush().map_err(|e| Error::io(path, e))?;
        }
        Format::Bin => {
            let bytes: Vec<u8> = f.values().iter().flat_map(|v| v.to_le_bytes()).collect();
            fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
        }
    }
    let d = f.domain();
    let side = Sidecar {
        n: d.dim(),
        depth: d.depth(),
        sigma,
    };
    let side_path = sidecar_path(path);
    fs::write(&side_path, serde_json::to_vec(&side)?).map_err(|e| Error::io(&side_path, e))?;
    Ok(())
}

/// Loads a sample file and its sidecar.
pub fn load(path: &Path) -> Result<(GridFunction, Sidecar)> {
    let side_path = sidecar_path(path);
    let raw = fs::read(&side_path).map_err(|e| Error::io(&side_path, e))?;
    let side: Sidecar = serde_json::from_slice(&raw)?;
    let values = match Format::from_path(path) {
        Format::Csv => {
            let mut r = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
            let mut out = Vec::new();
            for rec in r.records() {
                let rec = rec?;
                let field = rec.get(0).unwrap_or("").trim();
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Format(format!("{}: not a number: {field:?}", path.display())))?;
                out.push(v);
            }
            out
        }
        Format::Bin => {
            let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
            if bytes.len() % 8 != 0 {
                return Err(Error::Format(format!("{}: size is not a multiple of 8", path.display())));
            }
            bytes
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
                .collect()
        }
    };
    Ok((GridFunction::new(side.domain()?, values)?, side))
}

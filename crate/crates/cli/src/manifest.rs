//! Run manifests and the regression diff between two runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::config::{Geometry, OutputNormalization};
use crate::error::CliError;
use crate::output::{Emitted, OutputKind};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n_x: usize,
    pub window_um: f64,
    pub dx_um: f64,
    pub dq_per_um: f64,
    pub q0_per_um: Option<f64>,
    pub q_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub label: String,
    pub points: usize,
    pub max_rel: f64,
    pub max_abs_near_zero: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub scenario: String,
    pub geometry: Geometry,
    pub config_sha256: String,
    pub grid: GridInfo,
    pub normalization: OutputNormalization,
    pub outputs: Vec<Emitted>,
    pub warnings: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
    pub oracle: Vec<OracleReport>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<(Self, PathBuf), CliError> {
        let path = if path.is_dir() {
            path.join(MANIFEST_FILE)
        } else {
            path.to_path_buf()
        };
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let m = serde_json::from_str(&text)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((m, dir))
    }

    pub fn save(&self, dir: &Path) -> Result<(), CliError> {
        let text = serde_json::to_string_pretty(self).map_err(anyhow::Error::from)?;
        fs::write(dir.join(MANIFEST_FILE), text + "\n")?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FileDiff {
    pub file: String,
    pub max_abs: f64,
    pub max_rel: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiffReport {
    pub tolerance: f64,
    pub files: Vec<FileDiff>,
}

impl DiffReport {
    pub fn within_tolerance(&self) -> bool {
        self.files.iter().all(|f| f.max_abs <= self.tolerance)
    }
}

fn tabular(kind: OutputKind) -> bool {
    matches!(kind, OutputKind::Profile | OutputKind::Map | OutputKind::Table)
}

fn read_csv(path: &Path) -> Result<(csv::StringRecord, Vec<csv::StringRecord>), CliError> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let header = rdr
        .headers()
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let rows = rdr
        .records()
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    Ok((header, rows))
}

fn value(rec: &csv::StringRecord, path: &Path) -> Result<f64, CliError> {
    rec.get(rec.len().saturating_sub(1))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::Parse(format!("{}: non-numeric value column", path.display())))
}

/// Compares the tabular outputs of two runs. All columns but the last are
/// coordinates and must agree exactly; the last column is compared
/// numerically.
pub fn diff(a: &Path, b: &Path, tolerance: f64) -> Result<DiffReport, CliError> {
    let (ma, da) = RunManifest::load(a)?;
    let (mb, db) = RunManifest::load(b)?;
    if ma.geometry != mb.geometry {
        return Err(CliError::Schema(format!(
            "geometry {:?} vs {:?}",
            ma.geometry, mb.geometry
        )));
    }
    if ma.grid != mb.grid {
        return Err(CliError::Schema(format!("grids differ: {:?} vs {:?}", ma.grid, mb.grid)));
    }
    let shape = |m: &RunManifest| -> Vec<(String, OutputKind, usize, usize)> {
        let mut v: Vec<_> = m
            .outputs
            .iter()
            .filter(|o| tabular(o.kind))
            .map(|o| (o.file.clone(), o.kind, o.rows, o.cols))
            .collect();
        v.sort_by(|x, y| x.0.cmp(&y.0));
        v
    };
    let (sa, sb) = (shape(&ma), shape(&mb));
    if sa != sb {
        return Err(CliError::Schema("the runs have different tabular outputs".into()));
    }
    let mut files = Vec::new();
    for (file, ..) in sa {
        let (pa, pb) = (da.join(&file), db.join(&file));
        let (ha, ra) = read_csv(&pa)?;
        let (hb, rb) = read_csv(&pb)?;
        if ha != hb || ra.len() != rb.len() {
            return Err(CliError::Schema(format!("{file}: columns or row count differ")));
        }
        let mut max_abs = 0.0f64;
        let mut max_rel = 0.0f64;
        for (x, y) in ra.iter().zip(&rb) {
            let keys = x.len().saturating_sub(1);
            if x.len() != y.len() || (0..keys).any(|j| x.get(j) != y.get(j)) {
                return Err(CliError::Schema(format!("{file}: coordinates differ")));
            }
            let (u, v) = (value(x, &pa)?, value(y, &pb)?);
            let d = (u - v).abs();
            max_abs = max_abs.max(d);
            let scale = u.abs().max(v.abs());
            if scale > 0.0 {
                max_rel = max_rel.max(d / scale);
            }
        }
        files.push(FileDiff {
            file,
            max_abs,
            max_rel,
        });
    }
    Ok(DiffReport { tolerance, files })
}

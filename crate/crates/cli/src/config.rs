//! Scenario files.
//!
//! ```toml
//! geometry = "same_object"
//!
//! [aperture]
//! kind = "grating"
//! A0 = 1.0
//! d_um = 250.0
//! s_um = 78.125
//! N = 10
//!
//! [correlation]
//! kind = "gaussian"
//! r = 1.0
//! ```
//!
//! Lengths are in micrometres. Relative CSV paths resolve against the
//! directory of the config file.

use std::fs;
use std::path::{Path, PathBuf};

use biphoton_core::{
    Aperture64, CorrelationKernel, Grating64, GridSpec, Kernel64, WidthConvention, WindowSpec,
};
use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    SameObject,
    GhostQuantum,
    GhostClassical,
    SameObjectClassical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApertureKindConfig {
    Grating,
    Samples,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApertureConfig {
    pub kind: ApertureKindConfig,
    #[serde(rename = "A0")]
    pub a0: Option<f64>,
    pub d_um: Option<f64>,
    pub s_um: Option<f64>,
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKindConfig {
    #[default]
    Constant,
    Dirac,
    Gaussian,
    Samples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConventionConfig {
    #[default]
    Fwhm,
    TwoLnTwo,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationConfig {
    #[serde(default)]
    pub kind: KernelKindConfig,
    pub r: Option<f64>,
    #[serde(default)]
    pub width_convention: WidthConventionConfig,
    /// Reference length for `r`; defaults to the grating period.
    pub d_ref_um: Option<f64>,
    pub samples_csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_x: Option<usize>,
    pub window_um: Option<f64>,
    pub padding_factor: Option<f64>,
    pub q_window_q0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArmKindConfig {
    Open,
    Same,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArmConfig {
    pub kind: ArmKindConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Pgm,
    Svg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputNormalization {
    #[default]
    Peak,
    Raw,
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Pgm, Format::Svg]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub normalization: OutputNormalization,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: default_formats(),
            normalization: OutputNormalization::Peak,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    pub description: Option<String>,
    pub geometry: Geometry,
    pub aperture: ApertureConfig,
    #[serde(default)]
    pub correlation: CorrelationConfig,
    #[serde(default)]
    pub grid: GridConfig,
    pub arm_b: Option<ArmConfig>,
    #[serde(default)]
    pub output: OutputConfig,
    pub sweep: Option<SweepConfig>,
}

/// A parsed config together with where it came from.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub text: String,
    pub base_dir: PathBuf,
    pub name: String,
}

impl LoadedConfig {
    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "run".into());
        let base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_text(text, base_dir, name)
    }

    pub fn from_text(text: String, base_dir: PathBuf, fallback_name: String) -> Result<Self, CliError> {
        let config: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
        let name = config.name.clone().unwrap_or(fallback_name);
        let loaded = Self {
            config,
            text,
            base_dir,
            name,
        };
        loaded.validate()?;
        Ok(loaded)
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    fn validate(&self) -> Result<(), CliError> {
        let c = &self.config;
        let invalid = |m: String| Err(CliError::Invalid(m));
        match c.aperture.kind {
            ApertureKindConfig::Grating => {
                if c.aperture.d_um.is_none() || c.aperture.s_um.is_none() || c.aperture.n.is_none() {
                    return invalid("a grating aperture needs d_um, s_um and N".into());
                }
            }
            ApertureKindConfig::Samples => match &c.aperture.samples_csv {
                None => return invalid("aperture.samples_csv is required for kind = samples".into()),
                Some(p) if !self.resolve(p).is_file() => {
                    return invalid(format!("aperture samples file {} not found", p.display()))
                }
                _ => {}
            },
        }
        if c.correlation.kind == KernelKindConfig::Samples {
            match &c.correlation.samples_csv {
                None => {
                    return invalid("correlation.samples_csv is required for kind = samples".into())
                }
                Some(p) if !self.resolve(p).is_file() => {
                    return invalid(format!("kernel samples file {} not found", p.display()))
                }
                _ => {}
            }
        }
        if c.correlation.kind == KernelKindConfig::Gaussian && c.correlation.r.is_none() {
            return invalid("a gaussian kernel needs r".into());
        }
        if c.grid.window_um.is_some() && c.grid.padding_factor.is_some() {
            return invalid("give either grid.window_um or grid.padding_factor, not both".into());
        }
        if let Some(sweep) = &c.sweep {
            if c.geometry != Geometry::SameObject {
                return invalid("an r sweep needs geometry = same_object".into());
            }
            if sweep.r.is_empty() {
                return invalid("sweep.r is empty".into());
            }
            if let Some(r) = sweep.r.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
                return invalid(format!("sweep.r values must be positive, got {r}"));
            }
        }
        match (c.geometry, c.arm_b.as_ref().map(|a| a.kind)) {
            (Geometry::SameObject, Some(_)) => {
                return invalid("arm_b only applies to two-arm geometries".into())
            }
            (Geometry::GhostQuantum | Geometry::GhostClassical, Some(ArmKindConfig::Same)) => {
                return invalid("ghost geometries keep arm B open".into())
            }
            (Geometry::SameObjectClassical, Some(ArmKindConfig::Open)) => {
                return invalid("same_object_classical puts the object in both arms".into())
            }
            _ => {}
        }
        if c.output.formats.is_empty() {
            return invalid("output.formats is empty".into());
        }
        Ok(())
    }

    pub fn aperture(&self) -> Result<Aperture64, CliError> {
        let a = &self.config.aperture;
        match a.kind {
            ApertureKindConfig::Grating => {
                let g = Grating64::new(
                    a.a0.unwrap_or(1.0),
                    a.d_um.unwrap_or_default(),
                    a.s_um.unwrap_or_default(),
                    a.n.unwrap_or_default(),
                )?;
                Ok(Aperture64::grating(g))
            }
            ApertureKindConfig::Samples => {
                let path = self.resolve(a.samples_csv.as_deref().unwrap_or(Path::new("")));
                let (x, v) = read_pairs(&path)?;
                let amp = v.into_iter().map(|v| Complex::new(v, 0.0)).collect();
                Ok(Aperture64::sampled(x, amp)?)
            }
        }
    }

    /// The configured kernel. `d_ref` falls back to the grating period.
    pub fn kernel(&self, aperture: &Aperture64) -> Result<Kernel64, CliError> {
        let k = &self.config.correlation;
        Ok(match k.kind {
            KernelKindConfig::Constant => CorrelationKernel::Constant,
            KernelKindConfig::Dirac => CorrelationKernel::Dirac,
            KernelKindConfig::Gaussian => {
                let d = match (k.d_ref_um, aperture.period()) {
                    (Some(d), _) | (None, Some(d)) => d,
                    (None, None) => {
                        return Err(CliError::Invalid(
                            "correlation.d_ref_um is required without a grating".into(),
                        ))
                    }
                };
                let conv = match k.width_convention {
                    WidthConventionConfig::Fwhm => WidthConvention::Fwhm,
                    WidthConventionConfig::TwoLnTwo => WidthConvention::TwoLnTwo,
                };
                CorrelationKernel::gaussian(k.r.unwrap_or_default(), d, conv)?
            }
            KernelKindConfig::Samples => {
                let path = self.resolve(k.samples_csv.as_deref().unwrap_or(Path::new("")));
                let (o, v) = read_pairs(&path)?;
                CorrelationKernel::sampled_symmetric(o, v)?
            }
        })
    }

    pub fn grid_spec(&self, resolution: Option<usize>) -> GridSpec<f64> {
        let g = &self.config.grid;
        let d = GridSpec::<f64>::default();
        GridSpec {
            n_x: resolution.or(g.n_x).unwrap_or(d.n_x),
            window: match (g.window_um, g.padding_factor) {
                (Some(w), _) => WindowSpec::Explicit(w),
                (None, Some(p)) => WindowSpec::Padding(p),
                (None, None) => d.window,
            },
            q_window_q0: g.q_window_q0.unwrap_or(d.q_window_q0),
        }
    }

    pub fn output_directory(&self) -> String {
        self.config.output.directory.clone().unwrap_or_else(|| self.name.clone())
    }
}

/// Two numeric columns; a non-numeric first row is taken as a header.
fn read_pairs(path: &Path) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
    let mut xs = Vec::new();
    let mut vs = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        let parse = |j: usize| rec.get(j).and_then(|s| s.parse::<f64>().ok());
        match (parse(0), parse(1)) {
            (Some(x), Some(v)) => {
                xs.push(x);
                vs.push(v);
            }
            _ if i == 0 => continue,
            _ => {
                return Err(CliError::Parse(format!(
                    "{}: row {} is not two numbers",
                    path.display(),
                    i + 1
                )))
            }
        }
    }
    Ok((xs, vs))
}

//! Config-driven batch runs of the biphoton simulations: scenario files
//! in, CSV tables, graymaps, line plots and a checksummed manifest out.

pub mod config;
pub mod error;
pub mod manifest;
pub mod output;
pub mod run;
pub mod scenarios;

pub use config::{Geometry, LoadedConfig, RunConfig};
pub use error::CliError;
pub use manifest::{diff, DiffReport, RunManifest, MANIFEST_FILE};
pub use run::{run, simulate, RunOptions};

/// Environment variable naming the default output root.
pub const OUT_ENV: &str = "BIPHOTON_OUT";
pub const DEFAULT_OUT: &str = "biphoton-out";

//! Scenario files shipped with the binary. Grating parameters follow the
//! paper's figures: d = 250 um, s = 78.125 um (d/s = 3.2), N = 10.

use std::path::PathBuf;

use crate::config::LoadedConfig;
use crate::error::CliError;

pub struct Bundled {
    pub name: &'static str,
    pub text: &'static str,
}

macro_rules! bundled {
    ($($name:literal),* $(,)?) => {
        &[$(Bundled { name: $name, text: include_str!(concat!("../scenarios/", $name, ".toml")) }),*]
    };
}

pub const BUNDLED: &[Bundled] = bundled![
    "fig2_uncorrelated",
    "fig3_gaussian",
    "fig4_perfect",
    "fig5_sweep",
    "fig9_partial",
    "fig9_partial_fit",
    "fig10_ghost_uncorrelated",
    "fig10_ghost_perfect",
    "fig10_ghost_classical",
    "fig12_classical_same_object",
];

impl Bundled {
    /// The `description` line of the file.
    pub fn description(&self) -> String {
        toml::from_str::<toml::Table>(self.text)
            .ok()
            .and_then(|t| t.get("description").and_then(|d| d.as_str()).map(str::to_owned))
            .unwrap_or_default()
    }

    pub fn load(&self) -> Result<LoadedConfig, CliError> {
        LoadedConfig::from_text(self.text.into(), PathBuf::from("."), self.name.into())
    }
}

pub fn find(name: &str) -> Option<&'static Bundled> {
    BUNDLED.iter().find(|b| b.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_bundled_scenario_parses() {
        for b in BUNDLED {
            let c = b.load().unwrap_or_else(|e| panic!("{}: {e}", b.name));
            assert_eq!(c.name, b.name);
            assert!(!b.description().is_empty());
        }
    }
}

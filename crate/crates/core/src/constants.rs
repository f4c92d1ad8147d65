//! SI constants used at the model boundary.
//!
//! The table is pinned to CODATA 2018. Tests may point
//! `ENERGY_EXCHANGE_CONSTANTS` at a TOML file with the same keys to run
//! against a different table; nothing else reads the environment.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const CONSTANTS_ENV: &str = "ENERGY_EXCHANGE_CONSTANTS";

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Newtonian constant of gravitation, m^3 kg^-1 s^-2.
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674_30e-11;
/// Reduced Planck constant, J s (exact).
pub const REDUCED_PLANCK: f64 = 1.054_571_817e-34;

#[derive(Debug, Error)]
pub enum ConstantsError {
    #[error("cannot read constants table {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid constants table: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("constant {name} must be finite and positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsTable {
    pub version: String,
    pub c: f64,
    #[serde(rename = "G")]
    pub g: f64,
    pub hbar: f64,
}

impl Default for ConstantsTable {
    fn default() -> Self {
        Self::codata_2018()
    }
}

impl ConstantsTable {
    pub fn codata_2018() -> Self {
        Self {
            version: "CODATA 2018".to_string(),
            c: SPEED_OF_LIGHT,
            g: GRAVITATIONAL_CONSTANT,
            hbar: REDUCED_PLANCK,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, ConstantsError> {
        let table: ConstantsTable = toml::from_str(text)?;
        for (name, value) in [("c", table.c), ("G", table.g), ("hbar", table.hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(ConstantsError::NonPositive { name, value });
            }
        }
        Ok(table)
    }

    pub fn from_path(path: &Path) -> Result<Self, ConstantsError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConstantsError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    /// CODATA 2018 unless `ENERGY_EXCHANGE_CONSTANTS` names an override file.
    pub fn from_env() -> Result<Self, ConstantsError> {
        match std::env::var_os(CONSTANTS_ENV) {
            Some(path) => Self::from_path(Path::new(&path)),
            None => Ok(Self::codata_2018()),
        }
    }

    /// SHA-256 over the canonical rendering of the table.
    pub fn hash(&self) -> String {
        let canonical = format!(
            "version={};c={:e};G={:e};hbar={:e}",
            self.version, self.c, self.g, self.hbar
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

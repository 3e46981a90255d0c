//! Config-file loading: TOML first, JSON accepted.

use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;

use qcarrier_core::SchemeSpec;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

/// Reads a config file, trying TOML and then JSON.
pub fn load<T: DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
    let toml_err = match toml::from_str::<T>(&raw) {
        Ok(value) => return Ok(value),
        Err(e) => e,
    };
    match serde_json::from_str::<T>(&raw) {
        Ok(value) => Ok(value),
        Err(json_err) => Err(ConfigError(format!(
            "{} is neither valid TOML ({toml_err}) nor valid JSON ({json_err})",
            path.display()
        ))),
    }
}

fn default_stray_fraction() -> f64 {
    0.25
}

/// One adversary experiment, as described on disk.
#[derive(Debug, Deserialize)]
pub struct AttackConfig {
    /// passive_intercept | entangle_difference | contaminate_carrier | insider_b3
    pub kind: String,
    #[serde(default)]
    pub scheme: Option<SchemeSpec>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Symbol stream for passive/difference experiments.
    #[serde(default)]
    pub symbols: Vec<u32>,
    #[serde(default)]
    pub hadamard_rounds: bool,
    /// Explicit ξ_q rows for contamination, as [re, im] pairs.
    #[serde(default)]
    pub ancillas: Option<Vec<Vec<[f64; 2]>>>,
    /// "equal" or "orthogonal"; used when no explicit ancillas are given.
    #[serde(default)]
    pub preset: Option<String>,
    /// Optional unitary Eve applies to her ancilla during the Hadamard round.
    #[serde(default)]
    pub eve_unitary: Option<Vec<Vec<[f64; 2]>>>,
    /// End-to-end Monte Carlo confirmation through the session engine.
    #[serde(default)]
    pub monte_carlo: Option<MonteCarloConfig>,
}

#[derive(Debug, Deserialize)]
pub struct MonteCarloConfig {
    pub rounds: u32,
    #[serde(default = "default_stray_fraction")]
    pub stray_fraction: f64,
}

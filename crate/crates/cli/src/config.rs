//! Optional TOML configuration; command-line flags take precedence.

use std::path::{Path, PathBuf};

use serde::Deserialize;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Cells across the domain diameter; ignored when `cell_size` is set.
    pub resolution: usize,
    pub cell_size: Option<f64>,
    pub fine_time_samples: usize,
    pub tol: f64,
    pub element_cap: usize,
    pub witness_cap: usize,
    pub max_fine_samples: usize,
    pub oracle_slices: usize,
    pub output_dir: PathBuf,
    pub render: bool,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            resolution: 128,
            cell_size: None,
            fine_time_samples: 256,
            tol: 1e-4,
            element_cap: 10_000,
            witness_cap: 64,
            max_fine_samples: 4096,
            oracle_slices: 1024,
            output_dir: PathBuf::from("evasion-out"),
            render: false,
            seed: 0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let c: Config = toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), String> {
        let counts = [
            ("resolution", self.resolution, 2),
            ("fine_time_samples", self.fine_time_samples, 2),
            ("element_cap", self.element_cap, 1),
            ("witness_cap", self.witness_cap, 1),
            ("max_fine_samples", self.max_fine_samples, 2),
            ("oracle_slices", self.oracle_slices, 2),
        ];
        for (name, v, min) in counts {
            if v < min {
                return Err(format!("{name} must be at least {min}"));
            }
        }
        if !(self.tol > 0.0) {
            return Err("tol must be positive".into());
        }
        if let Some(h) = self.cell_size {
            if !(h > 0.0) {
                return Err("cell_size must be positive".into());
            }
        }
        Ok(())
    }
}

use std::path::{Path, PathBuf};

use etsim_core::noise::build_ensemble;
use etsim_core::{FluctuatorBand, FluctuatorEnsemble, NoiseCouplings, SystemParams};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/default.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemParams,
    pub noise: NoiseConfig,
    pub run: RunSettings,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub gamma_m: f64,
    pub gamma_c: f64,
    pub sigma: f64,
    pub g1: f64,
    pub g2: f64,
    pub n_fluctuators: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    pub dt: f64,
    pub t_max: f64,
    pub n_trajectories: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: PathBuf,
    pub format: String,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?;
                Self::parse(&text).map_err(|e| match e {
                    CliError::Config(msg) => CliError::Config(format!("{}: {msg}", p.display())),
                    other => other,
                })
            }
            None => Self::parse(DEFAULT_CONFIG),
        }
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let config: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate().map_err(|(key, msg)| match line_of(text, key) {
            Some(line) => CliError::Config(format!("{msg} at line {line}")),
            None => CliError::Config(msg),
        })?;
        Ok(config)
    }

    // Returns the offending key with the message.
    fn validate(&self) -> Result<(), (&'static str, String)> {
        let s = &self.system;
        s.validate().map_err(|e| ("system", e.to_string()))?;
        let n = &self.noise;
        FluctuatorBand::new(n.gamma_m, n.gamma_c, n.sigma).map_err(|e| {
            let key = match &e {
                etsim_core::Error::InvalidParameter { name, .. } => *name,
                _ => "noise",
            };
            (key, e.to_string())
        })?;
        if !n.g1.is_finite() {
            return Err(("g1", "`g1` must be finite".into()));
        }
        if !n.g2.is_finite() {
            return Err(("g2", "`g2` must be finite".into()));
        }
        if n.n_fluctuators == 0 {
            return Err(("n_fluctuators", "`n_fluctuators` must be at least 1".into()));
        }
        let r = &self.run;
        if !(r.dt.is_finite() && r.dt > 0.0) {
            return Err(("dt", format!("`dt` must be positive, got {}", r.dt)));
        }
        if !(r.t_max.is_finite() && r.t_max >= r.dt) {
            return Err(("t_max", format!("`t_max` must be finite and at least dt, got {}", r.t_max)));
        }
        if r.n_trajectories < 2 {
            return Err(("n_trajectories", format!("`n_trajectories` must be at least 2, got {}", r.n_trajectories)));
        }
        if self.output.format != "csv" {
            return Err(("format", format!("unsupported output format `{}` (only `csv`)", self.output.format)));
        }
        if self.output.path.as_os_str().is_empty() {
            return Err(("path", "`path` must not be empty".into()));
        }
        Ok(())
    }

    pub fn couplings(&self) -> NoiseCouplings {
        NoiseCouplings {
            g1: self.noise.g1,
            g2: self.noise.g2,
        }
    }

    pub fn band(&self) -> FluctuatorBand {
        FluctuatorBand {
            gamma_m: self.noise.gamma_m,
            gamma_c: self.noise.gamma_c,
            sigma: self.noise.sigma,
        }
    }

    /// `|g₁ − g₂|·σ`.
    pub fn d_sigma(&self) -> f64 {
        (self.noise.g1 - self.noise.g2).abs() * self.noise.sigma
    }

    pub fn ensemble(&self, seed: u64) -> Result<FluctuatorEnsemble, CliError> {
        let n = &self.noise;
        Ok(build_ensemble(n.n_fluctuators, n.gamma_m, n.gamma_c, n.sigma, seed)?)
    }
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    let quoted = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&quoted)).map(|i| i + 1)
}

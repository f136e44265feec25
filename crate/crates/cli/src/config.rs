//! Run configuration from a flat `key = value` file.

use std::path::Path;

use covprio_core::CriterionConfig;

use crate::error::CliError;
use crate::records::EvidenceSource;

pub const DEFAULT_CONFIG: &str = include_str!("../data/default.cfg");

pub const KEYS: [&str; 11] = [
    "delta",
    "alpha",
    "sigma_init_sq",
    "omega",
    "pi0",
    "bf_limit",
    "bfdr_level",
    "cp_threshold",
    "evidence_source",
    "gamma_sq",
    "n_ref",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub criteria: CriterionConfig,
    pub evidence_source: EvidenceSource,
    /// Between-study heterogeneity added to the new study's variance.
    pub gamma_sq: f64,
    /// Sample size the new-study SE refers to.
    pub n_ref: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            criteria: CriterionConfig::default(),
            evidence_source: EvidenceSource::ReplicationOnly,
            gamma_sq: 0.0,
            n_ref: 16540.0,
        }
    }
}

fn number(key: &str, raw: &str) -> Result<f64, CliError> {
    raw.parse::<f64>()
        .map_err(|_| CliError::Input(format!("{key}: '{raw}' is not a number")))
}

impl RunConfig {
    /// Set one key from its textual value.
    pub fn set(&mut self, key: &str, raw: &str) -> Result<(), CliError> {
        let raw = raw.trim();
        let c = &mut self.criteria;
        match key {
            "delta" => c.delta = number(key, raw)?,
            "alpha" => c.alpha = number(key, raw)?,
            "sigma_init_sq" => c.sigma_init_sq = number(key, raw)?,
            "omega" => c.omega = number(key, raw)?,
            "pi0" => c.pi0 = number(key, raw)?,
            "bf_limit" => c.bf_limit = number(key, raw)?,
            "bfdr_level" => c.bfdr_level = number(key, raw)?,
            "cp_threshold" => c.cp_threshold = number(key, raw)?,
            "evidence_source" => self.evidence_source = raw.parse().map_err(CliError::Input)?,
            "gamma_sq" => self.gamma_sq = number(key, raw)?,
            "n_ref" => self.n_ref = number(key, raw)?,
            other => {
                return Err(CliError::Input(format!(
                    "unknown config key '{other}' (known: {})",
                    KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    /// Apply a config file body on top of `self`. Blank lines and `#`
    /// comments are ignored; a key may appear only once.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        let mut seen = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Input(format!("config line {}: expected key = value", i + 1))
            })?;
            let key = key.trim();
            if seen.contains(&key) {
                return Err(CliError::Input(format!(
                    "config line {}: duplicate key '{key}'",
                    i + 1
                )));
            }
            seen.push(key);
            self.set(key, value)
                .map_err(|e| CliError::Input(format!("config line {}: {e}", i + 1)))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.criteria
            .validate()
            .map_err(|e| CliError::Input(format!("invalid configuration: {e}")))?;
        if !(self.gamma_sq >= 0.0 && self.gamma_sq.is_finite()) {
            return Err(CliError::Input(format!(
                "gamma_sq must be finite and >= 0, got {}",
                self.gamma_sq
            )));
        }
        if !(self.n_ref > 0.0 && self.n_ref.is_finite()) {
            return Err(CliError::Input(format!(
                "n_ref must be positive, got {}",
                self.n_ref
            )));
        }
        Ok(())
    }
}

//! Simulate-run configuration: file loading, flag overrides, manifest.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use lcsvar::experiments::{ExperimentConfig, ExperimentKind};
use lcsvar::words::ModelParams;

/// Keys mirror the CLI flags; all optional so a file can set any subset.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub experiment: Option<String>,
    pub m: Option<usize>,
    /// Decimal string or JSON number; parsed to an exact fraction.
    pub p: Option<serde_json::Value>,
    pub n: Option<usize>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    #[serde(rename = "K")]
    pub slope_k: Option<f64>,
    pub h: Option<f64>,
    pub nu: Option<f64>,
    pub epsilon: Option<f64>,
    #[serde(rename = "D")]
    pub d: Option<u64>,
}

impl PartialConfig {
    /// Later (flag-side) values win.
    pub fn overlay(mut self, flags: PartialConfig) -> PartialConfig {
        macro_rules! take {
            ($field:ident) => {
                if flags.$field.is_some() {
                    self.$field = flags.$field;
                }
            };
        }
        take!(experiment);
        take!(m);
        take!(p);
        take!(n);
        take!(reps);
        take!(seed);
        take!(k);
        take!(slope_k);
        take!(h);
        take!(nu);
        take!(epsilon);
        take!(d);
        self
    }
}

/// Fully resolved simulate run: everything needed to reproduce it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolvedConfig {
    pub experiment: String,
    pub m: usize,
    /// Exact decimal form of p.
    pub p: String,
    pub n: usize,
    pub reps: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub slope_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "D", skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
}

impl ResolvedConfig {
    pub fn from_partial(partial: PartialConfig, default_seed: u64) -> anyhow::Result<Self> {
        let p = match partial.p {
            None => "0.5".to_string(),
            Some(serde_json::Value::String(s)) => s,
            Some(serde_json::Value::Number(n)) => n.to_string(),
            Some(other) => {
                return Err(lcsvar::Error::ConfigParse(format!(
                    "key 'p' must be a number or string, got {other}"
                ))
                .into())
            }
        };
        Ok(ResolvedConfig {
            experiment: partial.experiment.unwrap_or_else(|| "variance".into()),
            m: partial.m.unwrap_or(2),
            p,
            n: partial.n.unwrap_or(100),
            reps: partial.reps.unwrap_or(10_000),
            seed: partial.seed.unwrap_or(default_seed),
            k: partial.k,
            slope_k: partial.slope_k,
            h: partial.h,
            nu: partial.nu,
            epsilon: partial.epsilon,
            d: partial.d,
        })
    }

    pub fn kind(&self) -> anyhow::Result<ExperimentKind> {
        Ok(self.experiment.parse::<ExperimentKind>()?)
    }

    pub fn params(&self) -> anyhow::Result<ModelParams> {
        Ok(ModelParams::from_decimal(self.m, &self.p)?)
    }

    pub fn experiment_config(&self) -> anyhow::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::new(self.params()?, self.n, self.reps, self.seed)?;
        cfg.k = self.k;
        cfg.slope_k = self.slope_k;
        cfg.h = self.h;
        cfg.nu = self.nu;
        cfg.epsilon = self.epsilon;
        cfg.d = self.d;
        Ok(cfg)
    }

    /// Hex SHA-256 of the canonical JSON form, truncated to 16 chars.
    pub fn hash(&self) -> String {
        hash_json(&serde_json::to_value(self).expect("config serializes"))
    }
}

/// Hex SHA-256 of a JSON value's compact form, truncated to 16 chars.
pub fn hash_json(value: &serde_json::Value) -> String {
    let canonical = serde_json::to_string(value).expect("json serializes");
    let digest = Sha256::digest(canonical.as_bytes());
    let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    hex[..16].to_string()
}

/// Loads a config file: either a bare flag-key object or a previously
/// written manifest (detected by its `config` key). An empty file means
/// all defaults.
pub fn load_config_file(path: &Path) -> anyhow::Result<PartialConfig> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    if text.trim().is_empty() {
        return Ok(PartialConfig::default());
    }
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
        lcsvar::Error::ConfigParse(format!(
            "{} at line {}, column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })?;
    let config_value = match value.get("config") {
        Some(inner) => inner.clone(), // manifest re-run
        None => value,
    };
    let partial: PartialConfig = serde_json::from_value(config_value)
        .map_err(|e| lcsvar::Error::ConfigParse(format!("{}: {e}", path.display())))?;
    Ok(partial)
}

/// Run manifest: emitted before results, and sufficient to reproduce them.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub version: String,
    pub timestamp_unix: u64,
    pub master_seed: u64,
    pub config_hash: String,
    pub config: ResolvedConfig,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, config: ResolvedConfig, outputs: Vec<String>) -> Self {
        let timestamp_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        RunManifest {
            schema_version: 1,
            subcommand: subcommand.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp_unix,
            master_seed: config.seed,
            config_hash: config.hash(),
            config,
            outputs,
        }
    }
}

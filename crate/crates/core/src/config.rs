//! Run configuration shared by every subcommand. A JSON file with these
//! field names can be passed with `--config`; flags override it.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::benchmark::{domain_catalog, loghub_legacy_catalog};
use crate::masker::{default_catalog, load_catalog, RuleCatalog, DEFAULT_PREFIX};
use crate::metrics::SubgroupSpec;
use crate::parsers::{ParserConfig, Preprocessing};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "json" => Ok(OutputFormat::Json),
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unknown output format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub dataset_path: Option<PathBuf>,
    pub ground_truth_path: Option<PathBuf>,
    pub log_format: Option<String>,
    /// A catalog JSON file, or one of `builtin:default`,
    /// `builtin:loghub-legacy`, `builtin:none`, `builtin:domain:<dataset>`.
    pub catalog_path: Option<String>,
    pub parser: ParserConfig,
    /// `None` turns the applicability filter off.
    pub applicability_prefix: Option<usize>,
    pub output_dir: PathBuf,
    pub subgroup: Option<SubgroupSpec>,
    pub format: OutputFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            dataset_path: None,
            ground_truth_path: None,
            log_format: None,
            catalog_path: None,
            parser: ParserConfig::default(),
            applicability_prefix: Some(DEFAULT_PREFIX),
            output_dir: PathBuf::from("."),
            subgroup: None,
            format: OutputFormat::Json,
        }
    }
}

impl RunConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<()> {
        self.parser.validate()?;
        if self.applicability_prefix == Some(0) {
            return Err(Error::Config(
                "applicability prefix must be at least 1".into(),
            ));
        }
        if let Some(spec) = &self.subgroup {
            spec.validate()?;
        }
        Ok(())
    }

    /// The dataset to read; falls back to the ground truth, whose CSV also
    /// carries the message content.
    pub fn input(&self) -> Result<&Path> {
        self.dataset_path
            .as_deref()
            .or(self.ground_truth_path.as_deref())
            .ok_or_else(|| Error::Config("no input dataset given (--input)".into()))
    }

    pub fn truth(&self) -> Result<&Path> {
        self.ground_truth_path
            .as_deref()
            .ok_or_else(|| Error::Config("this command needs a ground truth file (--truth)".into()))
    }

    pub fn catalog(&self) -> Result<RuleCatalog> {
        resolve_catalog(self.catalog_path.as_deref().unwrap_or("builtin:default"))
    }

    pub fn preprocessing(&self) -> Preprocessing {
        Preprocessing {
            applicability_prefix: self.applicability_prefix,
        }
    }
}

/// Resolves a `builtin:` name or loads a catalog file.
pub fn resolve_catalog(spec: &str) -> Result<RuleCatalog> {
    match spec.strip_prefix("builtin:") {
        Some("default") => Ok(default_catalog()),
        Some("loghub-legacy") => Ok(loghub_legacy_catalog()),
        Some("none") => Ok(RuleCatalog::empty()),
        Some(other) => match other.strip_prefix("domain:") {
            Some(dataset) => domain_catalog(dataset),
            None => Err(Error::Config(format!("unknown built-in catalog `{other}`"))),
        },
        None => load_catalog(spec),
    }
}

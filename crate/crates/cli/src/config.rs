//! The JSON experiment config. Every field is optional; command-line flags
//! override whatever the file sets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sigma_series::arith::{parse_rational, rational_string};
use sigma_series::sieve::{SieveRange, DEFAULT_SEGMENT};
use sigma_series::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Series,
    Sieve,
    Constellations,
    Criteria,
    Equidist,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub lo: u64,
    pub hi: u64,
    #[serde(default = "default_segment")]
    pub segment_size: u64,
}

fn default_segment() -> u64 {
    DEFAULT_SEGMENT
}

impl RangeConfig {
    pub fn to_range(self) -> Result<SieveRange, String> {
        SieveRange::with_segment_size(self.lo, self.hi, self.segment_size)
            .map_err(|e| e.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<CommandKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<RangeConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let cfg: Self = serde_json::from_str(&text)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        if let Some(eps) = &cfg.epsilon {
            parse_rational(eps).ok_or_else(|| format!("epsilon {eps:?} is not a rational"))?;
        }
        if cfg.workers == Some(0) {
            return Err("workers must be >= 1".into());
        }
        Ok(cfg)
    }
}

pub fn parse_rat(s: &str) -> Result<Rational, String> {
    parse_rational(s).ok_or_else(|| format!("{s:?} is not a rational of the form a/b"))
}

pub fn rat_string(x: &Rational) -> String {
    rational_string(x)
}

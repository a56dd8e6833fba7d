use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{concatenate_runs, demean, load_matrix, prewhiten_ar1, read_condition_data, Prewhitened};
use crate::error::{Error, Result};
use crate::model::ConditionData;

pub const MANIFEST_VERSION: u32 = 1;

/// A condition given either by a ready condition-data file or by the
/// blocks assigned to its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionEntry {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<PathBuf>,
}

/// One run of one subject, a `T x p` time-series matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockEntry {
    pub subject: String,
    pub run: String,
    pub condition: String,
    pub path: PathBuf,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub format_version: u32,
    pub conditions: Vec<ConditionEntry>,
    #[serde(default)]
    pub blocks: Vec<BlockEntry>,
    /// Apply AR(1) prewhitening to each run after demeaning.
    #[serde(default = "default_true")]
    pub prewhiten: bool,
}

impl Manifest {
    /// Reads JSON for `.json` files and TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let m: Manifest = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        if m.format_version != MANIFEST_VERSION {
            return Err(Error::Format(format!(
                "unsupported manifest version {}",
                m.format_version
            )));
        }
        Ok(m)
    }

    /// Builds the condition data, resolving relative paths against
    /// `base`. Returns preprocessing warnings alongside.
    pub fn resolve(&self, base: &Path) -> Result<(Vec<ConditionData<f64>>, Vec<String>)> {
        if self.conditions.is_empty() {
            return Err(Error::Config("manifest lists no conditions".into()));
        }
        if let Some(b) = self
            .blocks
            .iter()
            .find(|b| !self.conditions.iter().any(|c| c.label == b.condition))
        {
            return Err(Error::Config(format!(
                "block {}/{} assigned to unknown condition '{}'",
                b.subject, b.run, b.condition
            )));
        }
        let mut out = Vec::with_capacity(self.conditions.len());
        let mut warnings = Vec::new();
        for c in &self.conditions {
            let blocks: Vec<&BlockEntry> =
                self.blocks.iter().filter(|b| b.condition == c.label).collect();
            match (&c.data, blocks.is_empty()) {
                (Some(path), true) => {
                    let d = read_condition_data(&base.join(path))?;
                    if d.label != c.label {
                        return Err(Error::Config(format!(
                            "condition file {} is labelled '{}', manifest says '{}'",
                            path.display(),
                            d.label,
                            c.label
                        )));
                    }
                    out.push(d);
                }
                (None, false) => {
                    let processed: Vec<Result<Prewhitened>> = blocks
                        .par_iter()
                        .map(|b| {
                            let x = demean(&load_matrix(&base.join(&b.path))?);
                            if self.prewhiten {
                                prewhiten_ar1(&x)
                            } else {
                                Ok(Prewhitened::assume_whitened(x))
                            }
                        })
                        .collect();
                    let mut runs = Vec::with_capacity(processed.len());
                    for (b, r) in blocks.iter().zip(processed) {
                        let pw = r?;
                        warnings.extend(
                            pw.warnings.iter().map(|w| format!("{}/{}: {w}", b.subject, b.run)),
                        );
                        runs.push(pw);
                    }
                    out.push(concatenate_runs(&c.label, &runs)?);
                }
                (Some(_), false) => {
                    return Err(Error::Config(format!(
                        "condition '{}' has both a data file and blocks",
                        c.label
                    )));
                }
                (None, true) => {
                    return Err(Error::Config(format!("condition '{}' has no data", c.label)));
                }
            }
        }
        Ok((out, warnings))
    }
}

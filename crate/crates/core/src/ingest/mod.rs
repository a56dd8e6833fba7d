//! Time-series loading and preprocessing into condition data.

mod manifest;
mod matrix;
mod preprocess;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use manifest::{BlockEntry, ConditionEntry, Manifest, MANIFEST_VERSION};
pub use matrix::{load_matrix, write_matrix_binary, write_matrix_csv, BINARY_MAGIC};
pub use preprocess::{concatenate_runs, demean, prewhiten_ar1, svd_extract, Prewhitened};

use crate::error::{Error, Result};
use crate::inference::output::{read_json, write_json};
use crate::model::ConditionData;

pub const CONDITION_DATA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ConditionDataFile {
    format_version: u32,
    #[serde(flatten)]
    data: ConditionData<f64>,
}

pub fn write_condition_data(path: &Path, data: &ConditionData<f64>) -> Result<()> {
    write_json(
        path,
        &ConditionDataFile {
            format_version: CONDITION_DATA_VERSION,
            data: data.clone(),
        },
    )
}

pub fn read_condition_data(path: &Path) -> Result<ConditionData<f64>> {
    let f: ConditionDataFile = read_json(path)?;
    if f.format_version != CONDITION_DATA_VERSION {
        return Err(Error::Format(format!(
            "unsupported condition-data version {}",
            f.format_version
        )));
    }
    f.data.validate()?;
    Ok(f.data)
}

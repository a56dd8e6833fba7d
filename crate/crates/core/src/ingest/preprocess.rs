use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::model::ConditionData;

/// Subtracts each column's mean.
pub fn demean(series: &DMatrix<f64>) -> DMatrix<f64> {
    let t = series.nrows();
    let mut out = series.clone();
    if t == 0 {
        return out;
    }
    for mut col in out.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / t as f64;
        col.iter_mut().for_each(|x| *x -= mean);
        // second pass removes the rounding left by the first
        let resid = col.iter().sum::<f64>() / t as f64;
        col.iter_mut().for_each(|x| *x -= resid);
    }
    out
}

/// AR(1) residuals of one run, one row shorter than its input.
#[derive(Debug, Clone, PartialEq)]
pub struct Prewhitened {
    data: DMatrix<f64>,
    /// Lag-1 coefficient per column; `None` for zero-variance columns.
    pub phi: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

impl Prewhitened {
    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Wraps series the caller has already whitened.
    pub fn assume_whitened(data: DMatrix<f64>) -> Self {
        let p = data.ncols();
        Self { data, phi: vec![None; p], warnings: Vec::new() }
    }
}

/// Fits `x_t = phi x_{t-1} + e_t` per column by the lag-1 ratio and returns
/// the residuals for `t = 2..T`.
pub fn prewhiten_ar1(series: &DMatrix<f64>) -> Result<Prewhitened> {
    let (t, p) = series.shape();
    if t < 3 {
        return Err(Error::Usage(format!("prewhitening needs at least 3 time points, got {t}")));
    }
    let mut data = DMatrix::zeros(t - 1, p);
    let mut phi = Vec::with_capacity(p);
    let mut warnings = Vec::new();
    for j in 0..p {
        let x = series.column(j);
        let den: f64 = (0..t - 1).map(|s| x[s] * x[s]).sum();
        if !(den > 0.0) {
            warnings.push(format!("column {j} has zero variance; passed through as zeros"));
            phi.push(None);
            continue;
        }
        let num: f64 = (1..t).map(|s| x[s] * x[s - 1]).sum();
        let f = num / den;
        for s in 1..t {
            data[(s - 1, j)] = x[s] - f * x[s - 1];
        }
        phi.push(Some(f));
    }
    Ok(Prewhitened { data, phi, warnings })
}

/// Pools whitened runs into one condition: `sum_b X_b^T X_b` and
/// `sum_b T_b`. The sum is taken in a fixed order of values so the result
/// does not depend on the order of the blocks.
pub fn concatenate_runs(label: &str, blocks: &[Prewhitened]) -> Result<ConditionData<f64>> {
    let first = blocks.first().ok_or_else(|| Error::Ingestion {
        location: label.to_string(),
        message: "no blocks to concatenate".into(),
    })?;
    let p = first.data.ncols();
    if let Some((i, b)) = blocks.iter().enumerate().find(|(_, b)| b.data.ncols() != p) {
        return Err(Error::Ingestion {
            location: format!("{label}, block {i}"),
            message: format!("block has {} columns, expected {p}", b.data.ncols()),
        });
    }
    let grams: Vec<DMatrix<f64>> = blocks.iter().map(|b| b.data.tr_mul(&b.data)).collect();
    let mut scatter = DMatrix::zeros(p, p);
    let mut vals = Vec::with_capacity(grams.len());
    for k in 0..p {
        for l in k..p {
            vals.clear();
            vals.extend(grams.iter().map(|g| g[(k, l)]));
            vals.sort_by(f64::total_cmp);
            let s: f64 = vals.iter().sum();
            scatter[(k, l)] = s;
            scatter[(l, k)] = s;
        }
    }
    let n_obs = blocks.iter().map(|b| b.data.nrows()).sum();
    ConditionData::new(label, scatter, n_obs)
}

/// First principal time series `u_1 s_1` of a `T x v` voxel block, signed
/// to correlate nonnegatively with the mean voxel series. All-zero input
/// yields zeros and a warning.
pub fn svd_extract(voxels: &DMatrix<f64>) -> Result<(DVector<f64>, Option<String>)> {
    let (t, v) = voxels.shape();
    if t < 2 || v < 1 {
        return Err(Error::Usage(format!("svd_extract needs T >= 2 and v >= 1, got {t}x{v}")));
    }
    if voxels.iter().all(|&x| x == 0.0) {
        return Ok((DVector::zeros(t), Some("all-zero voxel block".into())));
    }
    let svd = voxels.clone().svd(true, false);
    let u = svd.u.as_ref().expect("requested U");
    let (idx, &s1) = svd
        .singular_values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least one singular value");
    let mut out: DVector<f64> = u.column(idx) * s1;
    let mean_series: DVector<f64> = voxels.column_mean();
    if out.dot(&mean_series) < 0.0 {
        out = -out;
    }
    Ok((out, None))
}

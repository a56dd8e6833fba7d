//! JSON and CSV forms of the inference results. Node indices are 0-based.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::{
    DifferentialReport, EdgeInterval, NetworkEstimate, SelectionReport,
};
use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;
use crate::model::EdgeIndex;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub k: usize,
    pub l: usize,
    pub g: usize,
    pub inclusion_prob: f64,
    pub mean_precision: f64,
    pub mean_partial_corr: f64,
    pub ci_lower: f64,
    pub ci_upper: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateFile {
    pub format_version: u32,
    pub label: String,
    pub g: usize,
    pub p: usize,
    pub ci_level: f64,
    pub diagonal: Vec<f64>,
    pub edges: Vec<EdgeRecord>,
}

impl EstimateFile {
    pub fn from_estimate(est: &NetworkEstimate, g: usize) -> Self {
        let p = est.p();
        let edges = est
            .credible_intervals
            .iter()
            .map(|ci| EdgeRecord {
                k: ci.k,
                l: ci.l,
                g,
                inclusion_prob: est.inclusion_prob[(ci.k, ci.l)],
                mean_precision: est.mean_precision[(ci.k, ci.l)],
                mean_partial_corr: ci.mean,
                ci_lower: ci.lower,
                ci_upper: ci.upper,
                selected: est.adjacency.has(ci.k, ci.l),
            })
            .collect();
        Self {
            format_version: FORMAT_VERSION,
            label: est.label.clone(),
            g,
            p,
            ci_level: est.ci_level,
            diagonal: (0..p).map(|k| est.mean_precision[(k, k)]).collect(),
            edges,
        }
    }

    pub fn into_estimate(self) -> Result<NetworkEstimate> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported estimate format version {}",
                self.format_version
            )));
        }
        let p = self.p;
        let index = EdgeIndex::new(p);
        if self.diagonal.len() != p || self.edges.len() != index.len() {
            return Err(Error::Format("estimate file has inconsistent sizes".into()));
        }
        let mut omega = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(self.diagonal));
        let mut incl = DMatrix::zeros(p, p);
        let mut rho = DMatrix::identity(p, p);
        let mut adj = Adjacency::empty(p);
        let mut intervals = Vec::with_capacity(self.edges.len());
        for r in &self.edges {
            if r.k >= p || r.l >= p || r.k == r.l {
                return Err(Error::Format(format!("bad edge ({}, {})", r.k, r.l)));
            }
            for (a, b) in [(r.k, r.l), (r.l, r.k)] {
                omega[(a, b)] = r.mean_precision;
                incl[(a, b)] = r.inclusion_prob;
                rho[(a, b)] = r.mean_partial_corr;
            }
            adj.set(r.k, r.l, r.selected);
            intervals.push(EdgeInterval {
                k: r.k,
                l: r.l,
                lower: r.ci_lower,
                mean: r.mean_partial_corr,
                upper: r.ci_upper,
            });
        }
        Ok(NetworkEstimate {
            label: self.label,
            adjacency: adj,
            inclusion_prob: incl,
            mean_precision: omega,
            mean_partial_corr: rho,
            credible_intervals: intervals,
            ci_level: self.ci_level,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(w, value)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let r = BufReader::new(File::open(path)?);
    Ok(serde_json::from_reader(r)?)
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn write_estimate_json(path: &Path, est: &NetworkEstimate, g: usize) -> Result<()> {
    write_json(path, &EstimateFile::from_estimate(est, g))
}

pub fn read_estimate_json(path: &Path) -> Result<NetworkEstimate> {
    read_json::<EstimateFile>(path)?.into_estimate()
}

/// One row per edge.
pub fn write_estimate_csv(path: &Path, est: &NetworkEstimate, g: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for r in EstimateFile::from_estimate(est, g).edges {
        w.serialize(r).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub report: SelectionReport,
}

pub fn write_selection_json(path: &Path, report: &SelectionReport) -> Result<()> {
    write_json(
        path,
        &SelectionFile {
            format_version: FORMAT_VERSION,
            report: report.clone(),
        },
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialFile {
    pub format_version: u32,
    #[serde(flatten)]
    pub report: DifferentialReport,
}

pub fn write_differential_json(path: &Path, report: &DifferentialReport) -> Result<()> {
    write_json(
        path,
        &DifferentialFile {
            format_version: FORMAT_VERSION,
            report: report.clone(),
        },
    )
}

#[derive(Serialize)]
struct DifferentialRow {
    k: usize,
    l: usize,
    g: usize,
    h: usize,
    mean_z_difference: f64,
    t_statistic: f64,
    p_raw: f64,
    p_adjusted: f64,
    significant: bool,
    in_set_difference: bool,
}

pub fn write_differential_csv(path: &Path, report: &DifferentialReport) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for e in &report.edges {
        let in_set = report.set_difference.iter().any(|d| d.k == e.k && d.l == e.l);
        w.serialize(DifferentialRow {
            k: e.k,
            l: e.l,
            g: report.g,
            h: report.h,
            mean_z_difference: e.mean_z_difference,
            t_statistic: e.t_statistic,
            p_raw: e.p_raw,
            p_adjusted: e.p_adjusted,
            significant: e.significant,
            in_set_difference: in_set,
        })
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

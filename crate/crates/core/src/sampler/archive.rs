//! Stored post-burn-in draws, laid out edge-major: one contiguous series per
//! matrix entry so summaries stream over a single entry at a time.
//!
//! On disk an archive is a directory with `archive.json` (metadata) and
//! `archive.bin`, a concatenation of little-endian columns in this order:
//!
//! 1. `omega` as `f64`, for each condition, for each upper-triangle entry
//!    `(k, l)` with `k <= l` in row-major order;
//! 2. `delta` as `u8`, for each condition, for each edge `k < l`;
//! 3. `weight` as `f64`, for each condition, for each edge `k < l`;
//! 4. `concentration` as `f64`, one column per concentration slot.
//!
//! Every column holds `n_draws` values.

use std::fs;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{EdgeIndex, Link};

pub const ARCHIVE_FORMAT_VERSION: u32 = 1;

/// Index of `(k, l)`, `k <= l`, in the row-major upper triangle with
/// diagonal.
#[inline]
pub fn upper_index(p: usize, k: usize, l: usize) -> usize {
    let (a, b) = if k <= l { (k, l) } else { (l, k) };
    a * p - a * a.saturating_sub(1) / 2 + (b - a)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceArchive {
    p: usize,
    labels: Vec<String>,
    link: Link,
    iterations: Vec<usize>,
    omega: Vec<Vec<Vec<f64>>>,
    delta: Vec<Vec<Vec<u8>>>,
    weights: Vec<Vec<Vec<f64>>>,
    concentration: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ArchiveMeta {
    format_version: u32,
    p: usize,
    labels: Vec<String>,
    link: Link,
    n_draws: usize,
    concentration_slots: usize,
    iterations: Vec<usize>,
    layout: String,
}

impl TraceArchive {
    pub fn new(p: usize, labels: Vec<String>, concentration_slots: usize, link: Link) -> Self {
        let g = labels.len();
        let n_upper = p * (p + 1) / 2;
        let n_edges = p * (p - 1) / 2;
        Self {
            p,
            labels,
            link,
            iterations: Vec::new(),
            omega: vec![vec![Vec::new(); n_upper]; g],
            delta: vec![vec![Vec::new(); n_edges]; g],
            weights: vec![vec![Vec::new(); n_edges]; g],
            concentration: vec![Vec::new(); concentration_slots],
        }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n_conditions(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn link(&self) -> Link {
        self.link
    }

    pub fn len(&self) -> usize {
        self.iterations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterations.is_empty()
    }

    pub fn iterations(&self) -> &[usize] {
        &self.iterations
    }

    /// Appends one draw. `weights[g]` and `delta[g]` are edge-indexed.
    pub fn push(
        &mut self,
        iteration: usize,
        omega: &[&DMatrix<f64>],
        delta: &[&[bool]],
        weights: &[Vec<f64>],
        concentration: &[f64],
    ) {
        let p = self.p;
        for g in 0..self.n_conditions() {
            let mut idx = 0;
            for k in 0..p {
                for l in k..p {
                    self.omega[g][idx].push(omega[g][(k, l)]);
                    idx += 1;
                }
            }
            for (e, &d) in delta[g].iter().enumerate() {
                self.delta[g][e].push(d as u8);
                self.weights[g][e].push(weights[g][e]);
            }
        }
        for (slot, &m) in concentration.iter().enumerate() {
            self.concentration[slot].push(m);
        }
        self.iterations.push(iteration);
    }

    pub fn omega_series(&self, g: usize, k: usize, l: usize) -> &[f64] {
        &self.omega[g][upper_index(self.p, k, l)]
    }

    pub fn delta_series(&self, g: usize, edge: usize) -> &[u8] {
        &self.delta[g][edge]
    }

    pub fn weight_series(&self, g: usize, edge: usize) -> &[f64] {
        &self.weights[g][edge]
    }

    pub fn concentration_slots(&self) -> usize {
        self.concentration.len()
    }

    pub fn concentration_series(&self, slot: usize) -> &[f64] {
        &self.concentration[slot]
    }

    /// Full precision matrix of draw `s` for condition `g`.
    pub fn omega_draw(&self, g: usize, s: usize) -> DMatrix<f64> {
        let p = self.p;
        let mut m = DMatrix::zeros(p, p);
        let mut idx = 0;
        for k in 0..p {
            for l in k..p {
                let v = self.omega[g][idx][s];
                m[(k, l)] = v;
                m[(l, k)] = v;
                idx += 1;
            }
        }
        m
    }

    /// Posterior mean precision of condition `g`.
    pub fn mean_omega(&self, g: usize) -> DMatrix<f64> {
        let p = self.p;
        let n = self.len().max(1) as f64;
        let mut m = DMatrix::zeros(p, p);
        let mut idx = 0;
        for k in 0..p {
            for l in k..p {
                let v = self.omega[g][idx].iter().sum::<f64>() / n;
                m[(k, l)] = v;
                m[(l, k)] = v;
                idx += 1;
            }
        }
        m
    }

    /// Checks the archive invariants: aligned lengths, positive-definite
    /// precisions, weights in `[0, 1]`.
    pub fn validate(&self) -> Result<()> {
        let n = self.len();
        let aligned = self
            .omega
            .iter()
            .flatten()
            .map(Vec::len)
            .chain(self.delta.iter().flatten().map(Vec::len))
            .chain(self.weights.iter().flatten().map(Vec::len))
            .chain(self.concentration.iter().map(Vec::len))
            .all(|len| len == n);
        if !aligned {
            return Err(Error::Format("archive series have unequal lengths".into()));
        }
        for g in 0..self.n_conditions() {
            for s in 0..n {
                if self.omega_draw(g, s).cholesky().is_none() {
                    return Err(Error::Format(format!(
                        "stored precision (condition {g}, draw {s}) is not positive definite"
                    )));
                }
            }
            if self.weights[g].iter().flatten().any(|&w| !(0.0..=1.0).contains(&w)) {
                return Err(Error::Format("stored weight outside [0, 1]".into()));
            }
        }
        Ok(())
    }

    pub fn edges(&self) -> EdgeIndex {
        EdgeIndex::new(self.p)
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        let meta = ArchiveMeta {
            format_version: ARCHIVE_FORMAT_VERSION,
            p: self.p,
            labels: self.labels.clone(),
            link: self.link,
            n_draws: self.len(),
            concentration_slots: self.concentration.len(),
            iterations: self.iterations.clone(),
            layout: "edge-major little-endian: omega f64 [cond][k<=l], delta u8 [cond][k<l], \
                     weight f64 [cond][k<l], concentration f64 [slot]"
                .into(),
        };
        fs::write(dir.join("archive.json"), serde_json::to_string_pretty(&meta)?)?;
        let mut w = BufWriter::new(fs::File::create(dir.join("archive.bin"))?);
        for col in self.omega.iter().flatten() {
            for v in col {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        for col in self.delta.iter().flatten() {
            w.write_all(col)?;
        }
        for col in self.weights.iter().flatten().chain(&self.concentration) {
            for v in col {
                w.write_all(&v.to_le_bytes())?;
            }
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_dir(dir: &Path) -> Result<Self> {
        let meta_path = dir.join("archive.json");
        if !meta_path.exists() {
            return Err(Error::Usage(format!("no trace archive in {}", dir.display())));
        }
        let meta: ArchiveMeta = serde_json::from_str(&fs::read_to_string(meta_path)?)?;
        if meta.format_version != ARCHIVE_FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported archive format version {}",
                meta.format_version
            )));
        }
        let mut bytes = Vec::new();
        fs::File::open(dir.join("archive.bin"))?.read_to_end(&mut bytes)?;
        let mut archive = Self::new(meta.p, meta.labels, meta.concentration_slots, meta.link);
        let n = meta.n_draws;
        archive.iterations = meta.iterations;
        if archive.iterations.len() != n {
            return Err(Error::Format("iteration list does not match n_draws".into()));
        }
        let g = archive.n_conditions();
        let n_upper = archive.p * (archive.p + 1) / 2;
        let n_edges = archive.p * (archive.p - 1) / 2;
        let expected = n * (8 * g * n_upper + g * n_edges + 8 * g * n_edges + 8 * archive.concentration.len());
        if bytes.len() != expected {
            return Err(Error::Format(format!(
                "archive.bin has {} bytes, expected {expected}",
                bytes.len()
            )));
        }
        let mut pos = 0;
        let read_f64 = |pos: &mut usize| -> Vec<f64> {
            let col = bytes[*pos..*pos + 8 * n]
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
                .collect();
            *pos += 8 * n;
            col
        };
        for col in archive.omega.iter_mut().flatten() {
            *col = read_f64(&mut pos);
        }
        let delta_start = pos;
        pos += g * n_edges * n;
        for col in archive.weights.iter_mut().flatten() {
            *col = read_f64(&mut pos);
        }
        for col in archive.concentration.iter_mut() {
            *col = read_f64(&mut pos);
        }
        let mut dpos = delta_start;
        for col in archive.delta.iter_mut().flatten() {
            *col = bytes[dpos..dpos + n].to_vec();
            dpos += n;
        }
        Ok(archive)
    }
}

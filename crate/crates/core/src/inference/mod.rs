//! Posterior summaries: inclusion probabilities, FDR-controlled selection,
//! network estimates, differential edges, and convergence diagnostics.

pub mod diagnostics;
pub mod output;
pub mod stats;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;
use crate::model::{fisher_z, Hyperparams};
use crate::sampler::TraceArchive;

pub use diagnostics::{dickey_fuller, diagnose, DfOutcome, DiagnosticsReport, DF_CRITICAL_5PCT};

fn require_draws(archive: &TraceArchive) -> Result<()> {
    if archive.is_empty() {
        Err(Error::Usage("trace archive has no stored draws".into()))
    } else {
        Ok(())
    }
}

fn condition_index(archive: &TraceArchive, g: usize) -> Result<()> {
    if g >= archive.n_conditions() {
        Err(Error::Usage(format!(
            "condition {g} out of range ({} conditions)",
            archive.n_conditions()
        )))
    } else {
        Ok(())
    }
}

/// Per-condition posterior edge inclusion probabilities (mean of `delta`),
/// zero on the diagonal.
pub fn inclusion_probabilities(archive: &TraceArchive) -> Result<Vec<DMatrix<f64>>> {
    require_draws(archive)?;
    let edges = archive.edges();
    let n = archive.len() as f64;
    Ok((0..archive.n_conditions())
        .map(|g| {
            let probs: Vec<f64> = (0..edges.len())
                .map(|e| archive.delta_series(g, e).iter().map(|&d| d as f64).sum::<f64>() / n)
                .collect();
            edges.to_matrix(&probs, 0.0)
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdrMode {
    /// Select `zeta < kappa`.
    Probability,
    /// Select `statistic > kappa`.
    Strength,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FdrResult {
    Rate { fdr: f64, selected: usize },
    NoEdgesSelected,
}

impl FdrResult {
    pub fn rate(&self) -> Option<f64> {
        match self {
            FdrResult::Rate { fdr, .. } => Some(*fdr),
            FdrResult::NoEdgesSelected => None,
        }
    }
}

/// Estimated FDR, the mean exclusion probability over the selected edges.
pub fn fdr_for_threshold(
    zeta: &[f64],
    statistic: &[f64],
    kappa: f64,
    mode: FdrMode,
) -> Result<FdrResult> {
    if zeta.iter().any(|z| !(0.0..=1.0).contains(z)) {
        return Err(Error::ParameterDomain("exclusion probabilities must lie in [0, 1]".into()));
    }
    if mode == FdrMode::Strength && statistic.len() != zeta.len() {
        return Err(Error::Usage("statistic and zeta lengths differ".into()));
    }
    let mut sum = 0.0;
    let mut count = 0usize;
    for (i, &z) in zeta.iter().enumerate() {
        let keep = match mode {
            FdrMode::Probability => z < kappa,
            FdrMode::Strength => statistic[i] > kappa,
        };
        if keep {
            sum += z;
            count += 1;
        }
    }
    Ok(if count == 0 {
        FdrResult::NoEdgesSelected
    } else {
        FdrResult::Rate { fdr: sum / count as f64, selected: count }
    })
}

/// Credible interval of one edge's partial correlation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeInterval {
    pub k: usize,
    pub l: usize,
    pub lower: f64,
    pub mean: f64,
    pub upper: f64,
}

/// Point estimate of one condition's network; serialized through
/// [`output::EstimateFile`].
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkEstimate {
    pub label: String,
    pub adjacency: Adjacency,
    pub inclusion_prob: DMatrix<f64>,
    pub mean_precision: DMatrix<f64>,
    pub mean_partial_corr: DMatrix<f64>,
    pub credible_intervals: Vec<EdgeInterval>,
    pub ci_level: f64,
}

impl NetworkEstimate {
    pub fn p(&self) -> usize {
        self.adjacency.p()
    }
}

/// How the reported networks were thresholded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    /// Edges with `|mean omega| > threshold` are selected.
    pub threshold: f64,
    pub fdr_target: Option<f64>,
    pub realized_fdr: FdrResult,
    /// Probability-mode threshold whose FDR is closest to, without
    /// exceeding, the realized FDR.
    pub matching_kappa: Option<f64>,
    pub warning: Option<String>,
}

/// Per-draw partial correlations of one edge.
pub fn partial_corr_series(archive: &TraceArchive, g: usize, k: usize, l: usize) -> Vec<f64> {
    let w = archive.omega_series(g, k, l);
    let dk = archive.omega_series(g, k, k);
    let dl = archive.omega_series(g, l, l);
    w.iter()
        .zip(dk.iter().zip(dl))
        .map(|(&w, (&a, &b))| (-w / (a * b).sqrt()).clamp(-1.0, 1.0))
        .collect()
}

fn estimate_condition(
    archive: &TraceArchive,
    g: usize,
    ci_level: f64,
    incl: DMatrix<f64>,
) -> NetworkEstimate {
    let p = archive.p();
    let edges = archive.edges();
    let mean_precision = archive.mean_omega(g);
    let lo_q = 0.5 * (1.0 - ci_level);
    let mut rho_mean = vec![0.0; edges.len()];
    let mut intervals = Vec::with_capacity(edges.len());
    for (e, &(k, l)) in edges.pairs().iter().enumerate() {
        let mut rho = partial_corr_series(archive, g, k, l);
        let mean = rho.iter().sum::<f64>() / rho.len() as f64;
        rho.sort_by(f64::total_cmp);
        // heavily skewed spike draws can push the mean past a tail quantile
        let lower = stats::quantile_sorted(&rho, lo_q).min(mean);
        let upper = stats::quantile_sorted(&rho, 1.0 - lo_q).max(mean);
        rho_mean[e] = mean;
        intervals.push(EdgeInterval { k, l, lower, mean, upper });
    }
    NetworkEstimate {
        label: archive.labels()[g].clone(),
        adjacency: Adjacency::empty(p),
        inclusion_prob: incl,
        mean_precision,
        mean_partial_corr: edges.to_matrix(&rho_mean, 1.0),
        credible_intervals: intervals,
        ci_level,
    }
}

/// Largest selection whose estimated FDR stays within `target`, scanning
/// edges from the largest statistic down. Returns the threshold; ties at
/// the boundary are kept together.
fn strength_threshold_for_target(zeta: &[f64], stat: &[f64], target: f64) -> Option<f64> {
    let mut order: Vec<usize> = (0..stat.len()).collect();
    order.sort_by(|&a, &b| stat[b].total_cmp(&stat[a]));
    let mut sum = 0.0;
    let mut best = None;
    let mut i = 0;
    while i < order.len() {
        let v = stat[order[i]];
        let mut j = i;
        while j < order.len() && stat[order[j]] == v {
            sum += zeta[order[j]];
            j += 1;
        }
        if v <= 0.0 {
            break;
        }
        if sum / j as f64 <= target {
            best = Some(j);
        }
        i = j;
    }
    best.map(|n| {
        if n < order.len() {
            stat[order[n]].max(0.0)
        } else {
            0.0
        }
    })
}

fn matching_kappa(zeta: &[f64], target: f64) -> Option<f64> {
    let mut z = zeta.to_vec();
    z.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut best = None;
    let mut i = 0;
    while i < z.len() {
        let v = z[i];
        let mut j = i;
        while j < z.len() && z[j] == v {
            sum += z[j];
            j += 1;
        }
        if sum / j as f64 <= target {
            best = Some(if j < z.len() { z[j] } else { 1.0 + f64::EPSILON });
        }
        i = j;
    }
    best
}

/// Network estimates for every condition. Without a target the default
/// rule `|mean omega| > edge_threshold` applies; with one the threshold is
/// lowered as far as the estimated FDR allows.
pub fn select_edges(
    archive: &TraceArchive,
    hp: &Hyperparams,
    fdr_target: Option<f64>,
) -> Result<(Vec<NetworkEstimate>, SelectionReport)> {
    require_draws(archive)?;
    if let Some(t) = fdr_target {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::Config(format!("fdr target {t} outside [0, 1]")));
        }
    }
    let incl = inclusion_probabilities(archive)?;
    let mut estimates: Vec<NetworkEstimate> = (0..archive.n_conditions())
        .map(|g| estimate_condition(archive, g, hp.ci_level, incl[g].clone()))
        .collect();

    let edges = archive.edges();
    let mut zeta = Vec::new();
    let mut strength = Vec::new();
    for est in &estimates {
        for &(k, l) in edges.pairs() {
            zeta.push((1.0 - est.inclusion_prob[(k, l)]).clamp(0.0, 1.0));
            strength.push(est.mean_precision[(k, l)].abs());
        }
    }

    let mut warning = None;
    let threshold = match fdr_target {
        None => hp.edge_threshold,
        Some(t) => match strength_threshold_for_target(&zeta, &strength, t) {
            Some(th) => th,
            None => {
                warning = Some(format!("no nonempty selection reaches estimated FDR {t}"));
                f64::INFINITY
            }
        },
    };
    for est in &mut estimates {
        est.adjacency = Adjacency::threshold(&est.mean_precision, threshold);
    }
    let realized = fdr_for_threshold(&zeta, &strength, threshold, FdrMode::Strength)?;
    if realized == FdrResult::NoEdgesSelected && warning.is_none() {
        warning = Some("no edges selected".into());
    }
    let kappa = realized.rate().and_then(|r| matching_kappa(&zeta, r));
    Ok((
        estimates,
        SelectionReport {
            threshold,
            fdr_target,
            realized_fdr: realized,
            matching_kappa: kappa,
            warning,
        },
    ))
}

/// An edge present in exactly one network of a condition pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SetDifferenceEdge {
    pub k: usize,
    pub l: usize,
    pub g: usize,
    pub h: usize,
    /// Condition (`g` or `h`) whose network contains the edge.
    pub present_in: usize,
}

pub fn differential_by_set_difference(estimates: &[NetworkEstimate]) -> Result<Vec<SetDifferenceEdge>> {
    if estimates.len() < 2 {
        return Err(Error::Usage("need at least two network estimates".into()));
    }
    let p = estimates[0].p();
    if estimates.iter().any(|e| e.p() != p) {
        return Err(Error::Usage("network estimates have different node counts".into()));
    }
    let mut out = Vec::new();
    for g in 0..estimates.len() {
        for h in g + 1..estimates.len() {
            let (a, b) = (&estimates[g].adjacency, &estimates[h].adjacency);
            for (k, l) in a.xor(b).edges() {
                out.push(SetDifferenceEdge {
                    k,
                    l,
                    g,
                    h,
                    present_in: if a.has(k, l) { g } else { h },
                });
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialEdge {
    pub k: usize,
    pub l: usize,
    pub mean_z_difference: f64,
    pub t_statistic: f64,
    pub p_raw: f64,
    pub p_adjusted: f64,
    pub significant: bool,
    /// Effective sample size of the difference trace when the corrected
    /// variant was requested.
    pub ess: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferentialReport {
    pub g: usize,
    pub h: usize,
    pub labels: (String, String),
    pub level: f64,
    pub ess_corrected: bool,
    pub edges: Vec<DifferentialEdge>,
    pub set_difference: Vec<SetDifferenceEdge>,
}

impl DifferentialReport {
    pub fn significant(&self) -> impl Iterator<Item = &DifferentialEdge> {
        self.edges.iter().filter(|e| e.significant)
    }

    /// Attaches the set-difference edges of this pair.
    pub fn with_set_difference(mut self, estimates: &[NetworkEstimate]) -> Result<Self> {
        let (g, h) = (self.g.min(self.h), self.g.max(self.h));
        self.set_difference = differential_by_set_difference(estimates)?
            .into_iter()
            .filter(|d| d.g == g && d.h == h)
            .collect();
        Ok(self)
    }
}

/// Edgewise t-tests of draw-wise Fisher-Z differences between conditions
/// `g` and `h`, with Benjamini-Hochberg adjustment over all edges.
pub fn differential_strength_test(
    archive: &TraceArchive,
    g: usize,
    h: usize,
    level: f64,
    ess_corrected: bool,
) -> Result<DifferentialReport> {
    condition_index(archive, g)?;
    condition_index(archive, h)?;
    if archive.len() < 2 {
        return Err(Error::Usage("differential test needs at least 2 stored draws".into()));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::Config(format!("significance level {level} outside (0, 1)")));
    }
    let edges = archive.edges();
    let z_of = |r: f64| fisher_z(r.clamp(-1.0 + 1e-15, 1.0 - 1e-15)).expect("clamped");
    let mut rows = Vec::with_capacity(edges.len());
    let mut raw = Vec::with_capacity(edges.len());
    for &(k, l) in edges.pairs() {
        let a = partial_corr_series(archive, g, k, l);
        let b = partial_corr_series(archive, h, k, l);
        let d: Vec<f64> = a.iter().zip(&b).map(|(&x, &y)| z_of(x) - z_of(y)).collect();
        let ess = ess_corrected.then(|| stats::effective_sample_size(&d));
        let t = stats::one_sample_t(&d, ess).expect("at least two draws");
        raw.push(t.p_value);
        rows.push(DifferentialEdge {
            k,
            l,
            mean_z_difference: d.iter().sum::<f64>() / d.len() as f64,
            t_statistic: t.statistic,
            p_raw: t.p_value,
            p_adjusted: 0.0,
            significant: false,
            ess,
        });
    }
    let adjusted = stats::benjamini_hochberg(&raw);
    for (row, q) in rows.iter_mut().zip(adjusted) {
        row.p_adjusted = q;
        row.significant = q < level;
    }
    Ok(DifferentialReport {
        g,
        h,
        labels: (archive.labels()[g].clone(), archive.labels()[h].clone()),
        level,
        ess_corrected,
        edges: rows,
        set_difference: Vec::new(),
    })
}

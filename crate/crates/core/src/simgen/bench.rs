use std::path::Path;

use nalgebra::DMatrix;
use rand::RngCore;
use serde::{Deserialize, Serialize};

use super::{
    differential_tpr_fpr, l1_error, roc_auc, roc_curve, simulate, DiffRates, GroundTruth,
    SimScenario,
};
use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;
use crate::inference::{select_edges, FdrResult};
use crate::model::{ConditionData, EdgeIndex, Hyperparams, Link};
use crate::sampler::rng::keyed_stream;
use crate::sampler::Chain;

/// Seed of replicate `r` of a scenario whose master seed is `seed`.
pub fn replicate_seed(seed: u64, r: usize) -> u64 {
    keyed_stream(seed, &format!("replicate/{r}")).next_u64()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    pub g: usize,
    pub h: usize,
    pub n_true: usize,
    pub n_estimated: usize,
    pub rates: DiffRates,
}

/// Scores for a set of precision estimates against the truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    /// AUC of `|omega_hat_kl|` per condition.
    pub auc: Vec<Option<f64>>,
    pub l1: Vec<f64>,
    /// Differential edges by set difference of the thresholded networks.
    pub differential: Vec<PairScore>,
    pub roc: Vec<Vec<(f64, f64)>>,
}

impl Scores {
    pub fn mean_auc(&self) -> Option<f64> {
        let v: Vec<f64> = self.auc.iter().flatten().copied().collect();
        (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
    }
}

/// Scores any precision estimates, from this crate or elsewhere.
pub fn score_precisions(
    truth: &GroundTruth,
    estimates: &[DMatrix<f64>],
    threshold: f64,
) -> Result<Scores> {
    if estimates.len() != truth.precision.len() {
        return Err(Error::Usage(format!(
            "{} estimates for {} conditions",
            estimates.len(),
            truth.precision.len()
        )));
    }
    let p = truth.precision[0].nrows();
    let edges = EdgeIndex::new(p);
    let mut auc = Vec::new();
    let mut l1 = Vec::new();
    let mut roc = Vec::new();
    let mut selected = Vec::new();
    for (g, est) in estimates.iter().enumerate() {
        l1.push(l1_error(est, &truth.precision[g])?);
        let scores: Vec<f64> = edges.from_matrix(est).iter().map(|w| w.abs()).collect();
        let labels: Vec<bool> = edges.pairs().iter().map(|&(k, l)| truth.adjacency[g].has(k, l)).collect();
        auc.push(roc_auc(&scores, &labels)?);
        roc.push(roc_curve(&scores, &labels));
        selected.push(Adjacency::threshold(est, threshold));
    }
    let mut differential = Vec::new();
    for g in 0..estimates.len() {
        for h in g + 1..estimates.len() {
            let est = selected[g].xor(&selected[h]).edges().into_iter().collect();
            let tru = truth.differential(g, h);
            differential.push(PairScore {
                g,
                h,
                n_true: tru.len(),
                n_estimated: selected[g].xor(&selected[h]).n_edges(),
                rates: differential_tpr_fpr(&est, &tru, edges.len())?,
            });
        }
    }
    Ok(Scores { auc, l1, differential, roc })
}

/// Independence baseline `diag(n / S_kk)`.
pub fn diagonal_estimate(data: &ConditionData<f64>) -> DMatrix<f64> {
    let p = data.p();
    DMatrix::from_fn(p, p, |k, l| {
        if k == l && data.scatter[(k, k)] > 0.0 {
            data.n_obs as f64 / data.scatter[(k, k)]
        } else if k == l {
            1.0
        } else {
            0.0
        }
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateResult {
    pub replicate: usize,
    pub data_seed: u64,
    pub chain_seed: u64,
    pub link: Link,
    pub scores: Scores,
    /// AUC using posterior inclusion probabilities as scores.
    pub auc_inclusion: Vec<Option<f64>>,
    pub l1_diagonal: Vec<f64>,
    /// Posterior FDR estimate of the default selection.
    pub estimated_fdr: FdrResult,
    /// Fraction of selected edges absent from the truth.
    pub realized_fdp: Option<f64>,
    /// Positive-definiteness checks passed by the chain.
    pub pd_checks: usize,
    pub sweeps: usize,
}

/// Simulates replicate `r` of `scenario`, fits it with `hp`, and scores the
/// default selection. The data depend only on the scenario seed and `r`,
/// so fits with different hyperparameters see the same data.
pub fn run_replicate(scenario: &SimScenario, hp: &Hyperparams, r: usize) -> Result<ReplicateResult> {
    let data_seed = replicate_seed(scenario.seed, r);
    let sc = SimScenario { seed: data_seed, ..scenario.clone() };
    let (truth, data) = simulate(&sc)?;
    let chain_seed = keyed_stream(hp.seed, &format!("chain/{r}")).next_u64();
    let hp = Hyperparams { seed: chain_seed, ..hp.clone() };

    let mut chain = Chain::new(&data, &hp)?;
    let mut archive = chain.empty_archive();
    for it in 0..hp.n_burnin + hp.n_iter {
        chain.sweep()?;
        if it >= hp.n_burnin && (it - hp.n_burnin + 1) % hp.thin == 0 {
            chain.record(&mut archive);
        }
    }
    let (estimates, report) = select_edges(&archive, &hp, None)?;
    let means: Vec<DMatrix<f64>> = estimates.iter().map(|e| e.mean_precision.clone()).collect();
    let scores = score_precisions(&truth, &means, hp.edge_threshold)?;

    let edges = EdgeIndex::new(sc.p);
    let mut auc_inclusion = Vec::new();
    let (mut n_sel, mut n_false) = (0usize, 0usize);
    for (g, est) in estimates.iter().enumerate() {
        let labels: Vec<bool> = edges.pairs().iter().map(|&(k, l)| truth.adjacency[g].has(k, l)).collect();
        auc_inclusion.push(roc_auc(&edges.from_matrix(&est.inclusion_prob), &labels)?);
        for (k, l) in est.adjacency.edges() {
            n_sel += 1;
            if !truth.adjacency[g].has(k, l) {
                n_false += 1;
            }
        }
    }
    Ok(ReplicateResult {
        replicate: r,
        data_seed,
        chain_seed,
        link: hp.link,
        scores,
        auc_inclusion,
        l1_diagonal: data
            .iter()
            .zip(&truth.precision)
            .map(|(d, t)| l1_error(&diagonal_estimate(d), t))
            .collect::<Result<_>>()?,
        estimated_fdr: report.realized_fdr,
        realized_fdp: (n_sel > 0).then(|| n_false as f64 / n_sel as f64),
        pd_checks: chain.pd_checks(),
        sweeps: hp.n_burnin + hp.n_iter,
    })
}

#[derive(Serialize)]
struct ResultRow<'a> {
    replicate: usize,
    metric: String,
    method: &'a str,
    value: Option<f64>,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Tidy table: one row per (replicate, metric, method). L1 errors are
/// reported times 100.
pub fn write_results_csv(path: &Path, results: &[ReplicateResult], labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for res in results {
        let method = format!("bjnl-{}", res.link.name());
        let mut row = |metric: String, method: &str, value: Option<f64>| {
            w.serialize(ResultRow { replicate: res.replicate, metric, method, value })
                .map_err(csv_error)
        };
        row("auc_mean".into(), &method, res.scores.mean_auc())?;
        for (g, label) in labels.iter().enumerate() {
            row(format!("auc[{label}]"), &method, res.scores.auc[g])?;
            row(format!("auc_inclusion[{label}]"), &method, res.auc_inclusion[g])?;
            row(format!("l1_x100[{label}]"), &method, Some(100.0 * res.scores.l1[g]))?;
            row(format!("l1_x100[{label}]"), "diagonal", Some(100.0 * res.l1_diagonal[g]))?;
        }
        for d in &res.scores.differential {
            let pair = format!("{}-{}", labels[d.g], labels[d.h]);
            row(format!("diff_tpr[{pair}]"), &method, d.rates.tpr)?;
            row(format!("diff_fpr[{pair}]"), &method, d.rates.fpr)?;
        }
        row("fdr_estimated".into(), &method, res.estimated_fdr.rate())?;
        row("fdp_realized".into(), &method, res.realized_fdp)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct RocRow<'a> {
    replicate: usize,
    method: &'a str,
    condition: &'a str,
    fpr: f64,
    tpr: f64,
}

pub fn write_roc_csv(path: &Path, results: &[ReplicateResult], labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for res in results {
        let method = format!("bjnl-{}", res.link.name());
        for (g, curve) in res.scores.roc.iter().enumerate() {
            for &(fpr, tpr) in curve {
                w.serialize(RocRow {
                    replicate: res.replicate,
                    method: &method,
                    condition: &labels[g],
                    fpr,
                    tpr,
                })
                .map_err(csv_error)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

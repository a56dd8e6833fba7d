use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    characteristic_path_length, clustering_coefficient, global_efficiency, local_efficiency,
    Adjacency,
};
use crate::error::{Error, Result};
use crate::inference::stats::{ks_two_sample, one_sample_t};
use crate::sampler::TraceArchive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    GlobalEfficiency,
    LocalEfficiency,
    ClusteringCoefficient,
    CharacteristicPathLength,
}

impl Metric {
    pub const ALL: [Metric; 4] = [
        Metric::GlobalEfficiency,
        Metric::LocalEfficiency,
        Metric::ClusteringCoefficient,
        Metric::CharacteristicPathLength,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::GlobalEfficiency => "global_efficiency",
            Metric::LocalEfficiency => "local_efficiency",
            Metric::ClusteringCoefficient => "clustering_coefficient",
            Metric::CharacteristicPathLength => "characteristic_path_length",
        }
    }

    /// Scalar summary of one graph; `None` when undefined.
    pub fn evaluate(self, adj: &Adjacency) -> Option<f64> {
        match self {
            Metric::GlobalEfficiency => global_efficiency(adj).ok(),
            Metric::LocalEfficiency => Some(local_efficiency(adj).mean),
            Metric::ClusteringCoefficient => Some(clustering_coefficient(adj).mean),
            Metric::CharacteristicPathLength => characteristic_path_length(adj).value(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum TestOutcome {
    Computed { statistic: f64, p_value: f64 },
    InsufficientDraws,
}

impl TestOutcome {
    pub fn p_value(&self) -> Option<f64> {
        match self {
            TestOutcome::Computed { p_value, .. } => Some(*p_value),
            TestOutcome::InsufficientDraws => None,
        }
    }

    pub fn statistic(&self) -> Option<f64> {
        match self {
            TestOutcome::Computed { statistic, .. } => Some(*statistic),
            TestOutcome::InsufficientDraws => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub g: usize,
    pub h: usize,
    /// `value_g - value_h` for draws where both are defined.
    pub differences: Vec<f64>,
    pub t_test: TestOutcome,
    pub ks: TestOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricPosterior {
    pub metric: Metric,
    pub labels: Vec<String>,
    /// `values[g][s]`, aligned with the archive's draws.
    pub values: Vec<Vec<Option<f64>>>,
    /// Draws per condition where the metric was undefined.
    pub excluded: Vec<usize>,
    pub pairs: Vec<PairTest>,
}

impl MetricPosterior {
    pub fn defined(&self, g: usize) -> Vec<f64> {
        self.values[g].iter().flatten().copied().collect()
    }
}

/// Binarizes each stored precision draw at `threshold`, evaluates the
/// metrics per draw, and compares each condition pair with a paired t-test
/// on draw-wise differences and a two-sample KS test.
pub fn metric_posteriors(
    archive: &TraceArchive,
    threshold: f64,
    metrics: &[Metric],
) -> Result<Vec<MetricPosterior>> {
    if archive.is_empty() {
        return Err(Error::Usage("trace archive has no stored draws".into()));
    }
    let n_cond = archive.n_conditions();
    // per_draw[s][g][m]
    let per_draw: Vec<Vec<Vec<Option<f64>>>> = (0..archive.len())
        .into_par_iter()
        .map(|s| {
            (0..n_cond)
                .map(|g| {
                    let adj = Adjacency::threshold(&archive.omega_draw(g, s), threshold);
                    metrics.iter().map(|m| m.evaluate(&adj)).collect()
                })
                .collect()
        })
        .collect();

    let mut out = Vec::with_capacity(metrics.len());
    for (mi, &metric) in metrics.iter().enumerate() {
        let values: Vec<Vec<Option<f64>>> = (0..n_cond)
            .map(|g| per_draw.iter().map(|d| d[g][mi]).collect())
            .collect();
        let excluded = values.iter().map(|v| v.iter().filter(|x| x.is_none()).count()).collect();
        let mut pairs = Vec::new();
        for g in 0..n_cond {
            for h in g + 1..n_cond {
                let differences: Vec<f64> = values[g]
                    .iter()
                    .zip(&values[h])
                    .filter_map(|(a, b)| Some((*a)? - (*b)?))
                    .collect();
                let t_test = match one_sample_t(&differences, None) {
                    Some(t) => TestOutcome::Computed { statistic: t.statistic, p_value: t.p_value },
                    None => TestOutcome::InsufficientDraws,
                };
                let a: Vec<f64> = values[g].iter().flatten().copied().collect();
                let b: Vec<f64> = values[h].iter().flatten().copied().collect();
                let ks = if a.len() < 2 || b.len() < 2 {
                    TestOutcome::InsufficientDraws
                } else {
                    let k = ks_two_sample(&a, &b).expect("nonempty");
                    TestOutcome::Computed { statistic: k.statistic, p_value: k.p_value }
                };
                pairs.push(PairTest { g, h, differences, t_test, ks });
            }
        }
        out.push(MetricPosterior {
            metric,
            labels: archive.labels().to_vec(),
            values,
            excluded,
            pairs,
        });
    }
    Ok(out)
}

#[derive(Serialize)]
struct HistogramRow<'a> {
    metric: &'a str,
    condition: &'a str,
    bin_lower: f64,
    bin_upper: f64,
    count: usize,
    density: f64,
}

fn csv_error(e: csv::Error) -> Error {
    Error::Format(e.to_string())
}

/// Histogram table per metric and condition over a common bin grid.
pub fn write_histograms_csv(path: &Path, posteriors: &[MetricPosterior], bins: usize) -> Result<()> {
    if bins == 0 {
        return Err(Error::Usage("histogram needs at least one bin".into()));
    }
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for mp in posteriors {
        let all: Vec<f64> = (0..mp.values.len()).flat_map(|g| mp.defined(g)).collect();
        if all.is_empty() {
            continue;
        }
        let lo = all.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, hi + 0.5) };
        let width = (hi - lo) / bins as f64;
        for g in 0..mp.values.len() {
            let vals = mp.defined(g);
            let mut counts = vec![0usize; bins];
            for v in &vals {
                let b = (((v - lo) / width) as usize).min(bins - 1);
                counts[b] += 1;
            }
            for (b, &count) in counts.iter().enumerate() {
                let density = if vals.is_empty() {
                    0.0
                } else {
                    count as f64 / (vals.len() as f64 * width)
                };
                w.serialize(HistogramRow {
                    metric: mp.metric.name(),
                    condition: &mp.labels[g],
                    bin_lower: lo + b as f64 * width,
                    bin_upper: lo + (b + 1) as f64 * width,
                    count,
                    density,
                })
                .map_err(csv_error)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct TestRow<'a> {
    metric: &'a str,
    condition_a: &'a str,
    condition_b: &'a str,
    n_pairs: usize,
    mean_difference: Option<f64>,
    t_statistic: Option<f64>,
    t_p_value: Option<f64>,
    ks_statistic: Option<f64>,
    ks_p_value: Option<f64>,
}

/// One row per metric and condition pair; empty cells mark insufficient draws.
pub fn write_tests_csv(path: &Path, posteriors: &[MetricPosterior]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    for mp in posteriors {
        for pt in &mp.pairs {
            let n = pt.differences.len();
            w.serialize(TestRow {
                metric: mp.metric.name(),
                condition_a: &mp.labels[pt.g],
                condition_b: &mp.labels[pt.h],
                n_pairs: n,
                mean_difference: (n > 0).then(|| pt.differences.iter().sum::<f64>() / n as f64),
                t_statistic: pt.t_test.statistic(),
                t_p_value: pt.t_test.p_value(),
                ks_statistic: pt.ks.statistic(),
                ks_p_value: pt.ks.p_value(),
            })
            .map_err(csv_error)?;
        }
    }
    w.flush()?;
    Ok(())
}

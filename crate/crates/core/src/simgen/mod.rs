//! Simulation benchmark: network generators, controlled discordance between
//! conditions, precision construction, Gaussian data, and scoring.

mod bench;
mod network;
mod precision;
mod score;

use std::collections::BTreeSet;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use bench::{
    diagonal_estimate, replicate_seed, run_replicate, score_precisions, write_results_csv,
    write_roc_csv, ReplicateResult, Scores,
};
pub use network::{flip_edges, gen_network, Family, FlipRecord, NetworkParams};
pub use precision::{build_precision, sample_data, shift_to_floor, DEFAULT_EIGEN_FLOOR};
pub use score::{differential_tpr_fpr, l1_error, roc_auc, roc_curve, DiffRates};

use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;
use crate::model::ConditionData;
use crate::sampler::rng::keyed_stream;

/// A benchmark scenario. Condition 1 is drawn from the family; every
/// further condition flips `flip_fraction` of its edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimScenario {
    pub family: Family,
    pub p: usize,
    pub n_conditions: usize,
    pub flip_fraction: f64,
    pub n_subjects: usize,
    pub t_points: usize,
    pub edge_prob: f64,
    pub ring_degree: usize,
    pub rewire_prob: f64,
    pub attach: usize,
    pub eigen_floor: f64,
    pub seed: u64,
}

impl Default for SimScenario {
    fn default() -> Self {
        let np = NetworkParams::default();
        Self {
            family: Family::ErdosRenyi,
            p: 40,
            n_conditions: 2,
            flip_fraction: 0.5,
            n_subjects: 10,
            t_points: 100,
            edge_prob: np.edge_prob,
            ring_degree: np.ring_degree,
            rewire_prob: np.rewire_prob,
            attach: np.attach,
            eigen_floor: DEFAULT_EIGEN_FLOOR,
            seed: 0,
        }
    }
}

const SCENARIO_KEYS: [&str; 12] = [
    "family",
    "p",
    "n_conditions",
    "flip_fraction",
    "n_subjects",
    "t_points",
    "edge_prob",
    "ring_degree",
    "rewire_prob",
    "attach",
    "eigen_floor",
    "seed",
];

fn unknown_keys<'a>(keys: impl Iterator<Item = &'a String>) -> Result<()> {
    let unknown: Vec<&str> = keys
        .map(String::as_str)
        .filter(|k| !SCENARIO_KEYS.contains(k))
        .collect();
    if unknown.is_empty() {
        Ok(())
    } else {
        Err(Error::Config(format!("unknown scenario keys: {}", unknown.join(", "))))
    }
}

impl SimScenario {
    pub fn params(&self) -> NetworkParams {
        NetworkParams {
            edge_prob: self.edge_prob,
            ring_degree: self.ring_degree,
            rewire_prob: self.rewire_prob,
            attach: self.attach,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::Config(format!("p must be at least 2, got {}", self.p)));
        }
        if self.n_conditions == 0 {
            return Err(Error::Config("n_conditions must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.flip_fraction) {
            return Err(Error::Config(format!(
                "flip_fraction {} outside [0, 1]",
                self.flip_fraction
            )));
        }
        if self.n_subjects == 0 {
            return Err(Error::Config("n_subjects must be positive".into()));
        }
        if !(self.eigen_floor > 0.0) {
            return Err(Error::Config("eigen_floor must be positive".into()));
        }
        self.params().validate(self.family, self.p)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        unknown_keys(table.keys())?;
        let s: Self = table.try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let map = value
            .as_object()
            .ok_or_else(|| Error::Config("scenario must be a JSON object".into()))?;
        unknown_keys(map.keys())?;
        let s: Self = serde_json::from_value(value).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    /// Reads JSON for `.json` files and TOML otherwise.
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)
        } else {
            Self::from_toml_str(&text)
        }
    }

    pub fn labels(&self) -> Vec<String> {
        (1..=self.n_conditions).map(|g| format!("c{g}")).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub labels: Vec<String>,
    pub adjacency: Vec<Adjacency>,
    pub precision: Vec<DMatrix<f64>>,
    /// Flips that produced condition `g + 1` from condition 1.
    pub flips: Vec<FlipRecord>,
}

impl GroundTruth {
    /// Edges present in exactly one of conditions `g` and `h`.
    pub fn differential(&self, g: usize, h: usize) -> BTreeSet<(usize, usize)> {
        self.adjacency[g].xor(&self.adjacency[h]).edges().into_iter().collect()
    }
}

/// Generates the truth and the sampled data of a scenario.
pub fn simulate(scenario: &SimScenario) -> Result<(GroundTruth, Vec<ConditionData<f64>>)> {
    scenario.validate()?;
    let seed = scenario.seed;
    let labels = scenario.labels();
    let base = gen_network(
        scenario.family,
        scenario.p,
        &scenario.params(),
        &mut keyed_stream(seed, "network"),
    )?;
    let mut adjacency = vec![base.clone()];
    let mut flips = Vec::new();
    for label in &labels[1..] {
        let (a, rec) = flip_edges(
            &base,
            scenario.flip_fraction,
            &mut keyed_stream(seed, &format!("flip/{label}")),
        )?;
        adjacency.push(a);
        flips.push(rec);
    }
    let precision: Vec<DMatrix<f64>> = adjacency
        .iter()
        .zip(&labels)
        .map(|(a, label)| {
            build_precision(
                a,
                &mut keyed_stream(seed, &format!("precision/{label}")),
                scenario.eigen_floor,
            )
        })
        .collect();
    let mut data_rngs: Vec<_> = labels
        .iter()
        .map(|l| keyed_stream(seed, &format!("data/{l}")))
        .collect();
    let data = sample_data(
        &labels,
        &precision,
        scenario.n_subjects,
        scenario.t_points,
        &mut data_rngs,
    )?;
    Ok((
        GroundTruth {
            labels,
            adjacency,
            precision,
            flips,
        },
        data,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scenario_parsing() {
        let s = SimScenario::from_toml_str("family = \"small_world\"\np = 20\nseed = 4").unwrap();
        assert_eq!((s.family, s.p, s.seed, s.n_conditions), (Family::SmallWorld, 20, 4, 2));
        let err = SimScenario::from_toml_str("p = 20\nbogus = 1\nother = 2").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("bogus") && msg.contains("other"), "{msg}");
        let err = SimScenario::from_json_str(r#"{"p": 20, "typo": 3}"#).unwrap_err();
        assert!(err.to_string().contains("typo"));
        assert!(SimScenario::from_toml_str("flip_fraction = 1.5").is_err());
        let j = SimScenario::from_json_str(r#"{"family": "scale_free", "p": 12}"#).unwrap();
        assert_eq!(j.family, Family::ScaleFree);
    }

    #[test]
    fn simulate_is_deterministic_and_consistent() {
        let sc = SimScenario { p: 15, n_subjects: 2, t_points: 20, seed: 7, ..Default::default() };
        let (t1, d1) = simulate(&sc).unwrap();
        let (t2, d2) = simulate(&sc).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(d1, d2);
        assert_eq!(d1[0].n_obs, 40);
        assert_eq!(t1.adjacency[0].n_edges(), t1.adjacency[1].n_edges());
        let r = t1.flips[0].removed.len();
        assert_eq!(t1.differential(0, 1).len(), 2 * r);
        for (a, om) in t1.adjacency.iter().zip(&t1.precision) {
            for (k, l) in a.non_edges() {
                assert_eq!(om[(k, l)], 0.0);
            }
        }
    }
}

use std::collections::VecDeque;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Adjacency;
use crate::error::{Error, Result};

/// Unweighted BFS distances; unreachable pairs are `f64::INFINITY`.
pub fn shortest_paths(adj: &Adjacency) -> DMatrix<f64> {
    let p = adj.p();
    let nbrs: Vec<Vec<usize>> = (0..p).map(|k| adj.neighbors(k)).collect();
    let mut d = DMatrix::from_element(p, p, f64::INFINITY);
    let mut queue = VecDeque::with_capacity(p);
    for s in 0..p {
        d[(s, s)] = 0.0;
        queue.clear();
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            let dv = d[(s, v)];
            for &w in &nbrs[v] {
                if d[(s, w)].is_infinite() {
                    d[(s, w)] = dv + 1.0;
                    queue.push_back(w);
                }
            }
        }
    }
    d
}

fn efficiency_of(d: &DMatrix<f64>) -> f64 {
    let p = d.nrows();
    if p < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for k in 0..p {
        for l in 0..p {
            if k != l {
                total += 1.0 / d[(k, l)];
            }
        }
    }
    total / (p * (p - 1)) as f64
}

/// Mean inverse distance over ordered node pairs.
pub fn global_efficiency(adj: &Adjacency) -> Result<f64> {
    if adj.p() < 2 {
        return Err(Error::Usage("global efficiency needs at least 2 nodes".into()));
    }
    Ok(efficiency_of(&shortest_paths(adj)))
}

/// Per-node values with their mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeMetric {
    pub per_node: Vec<f64>,
    pub mean: f64,
}

impl NodeMetric {
    fn from_values(per_node: Vec<f64>) -> Self {
        let mean = if per_node.is_empty() {
            0.0
        } else {
            per_node.iter().sum::<f64>() / per_node.len() as f64
        };
        Self { per_node, mean }
    }
}

/// Efficiency of each node's neighbour-induced subgraph.
pub fn local_efficiency(adj: &Adjacency) -> NodeMetric {
    let values = (0..adj.p())
        .map(|k| {
            let nb = adj.neighbors(k);
            if nb.len() < 2 {
                0.0
            } else {
                efficiency_of(&shortest_paths(&adj.induced(&nb)))
            }
        })
        .collect();
    NodeMetric::from_values(values)
}

/// Fraction of each node's neighbour pairs that are adjacent.
pub fn clustering_coefficient(adj: &Adjacency) -> NodeMetric {
    let values = (0..adj.p())
        .map(|k| {
            let nb = adj.neighbors(k);
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut links = 0usize;
            for (i, &a) in nb.iter().enumerate() {
                for &b in &nb[i + 1..] {
                    if adj.has(a, b) {
                        links += 1;
                    }
                }
            }
            2.0 * links as f64 / (d * (d - 1)) as f64
        })
        .collect();
    NodeMetric::from_values(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PathLength {
    /// Mean over reachable ordered pairs; `disconnected` marks graphs where
    /// some pairs were skipped.
    Defined { value: f64, disconnected: bool },
    Undefined,
}

impl PathLength {
    pub fn value(&self) -> Option<f64> {
        match self {
            PathLength::Defined { value, .. } => Some(*value),
            PathLength::Undefined => None,
        }
    }
}

pub fn characteristic_path_length(adj: &Adjacency) -> PathLength {
    let d = shortest_paths(adj);
    let p = adj.p();
    let mut total = 0.0;
    let mut reachable = 0usize;
    let mut missing = false;
    for k in 0..p {
        for l in 0..p {
            if k == l {
                continue;
            }
            if d[(k, l)].is_finite() {
                total += d[(k, l)];
                reachable += 1;
            } else {
                missing = true;
            }
        }
    }
    if reachable == 0 {
        PathLength::Undefined
    } else {
        PathLength::Defined {
            value: total / reachable as f64,
            disconnected: missing,
        }
    }
}

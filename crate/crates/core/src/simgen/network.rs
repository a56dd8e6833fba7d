use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphmetrics::Adjacency;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    ErdosRenyi,
    SmallWorld,
    ScaleFree,
}

/// Generator parameters; each family reads only its own fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkParams {
    /// Erdos-Renyi edge probability.
    pub edge_prob: f64,
    /// Watts-Strogatz ring degree (even).
    pub ring_degree: usize,
    /// Watts-Strogatz rewiring probability.
    pub rewire_prob: f64,
    /// Barabasi-Albert edges per new node.
    pub attach: usize,
}

impl Default for NetworkParams {
    fn default() -> Self {
        Self {
            edge_prob: 0.1,
            ring_degree: 4,
            rewire_prob: 0.1,
            attach: 2,
        }
    }
}

impl NetworkParams {
    pub fn validate(&self, family: Family, p: usize) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        match family {
            Family::ErdosRenyi => {
                if !(0.0..=1.0).contains(&self.edge_prob) {
                    return bad(format!("edge_prob {} outside [0, 1]", self.edge_prob));
                }
            }
            Family::SmallWorld => {
                if self.ring_degree % 2 == 1 || self.ring_degree >= p {
                    return bad(format!(
                        "ring_degree must be even and below p = {p}, got {}",
                        self.ring_degree
                    ));
                }
                if !(0.0..=1.0).contains(&self.rewire_prob) {
                    return bad(format!("rewire_prob {} outside [0, 1]", self.rewire_prob));
                }
            }
            Family::ScaleFree => {
                if self.attach == 0 || self.attach >= p {
                    return bad(format!("attach must be in 1..{p}, got {}", self.attach));
                }
            }
        }
        Ok(())
    }
}

pub fn gen_network<R: Rng + ?Sized>(
    family: Family,
    p: usize,
    params: &NetworkParams,
    rng: &mut R,
) -> Result<Adjacency> {
    params.validate(family, p)?;
    Ok(match family {
        Family::ErdosRenyi => erdos_renyi(p, params.edge_prob, rng),
        Family::SmallWorld => watts_strogatz(p, params.ring_degree, params.rewire_prob, rng),
        Family::ScaleFree => barabasi_albert(p, params.attach, rng),
    })
}

fn erdos_renyi<R: Rng + ?Sized>(p: usize, q: f64, rng: &mut R) -> Adjacency {
    let mut a = Adjacency::empty(p);
    for k in 0..p {
        for l in k + 1..p {
            if rng.random::<f64>() < q {
                a.set(k, l, true);
            }
        }
    }
    a
}

fn watts_strogatz<R: Rng + ?Sized>(p: usize, k: usize, beta: f64, rng: &mut R) -> Adjacency {
    let mut a = Adjacency::empty(p);
    for i in 0..p {
        for j in 1..=k / 2 {
            a.set(i, (i + j) % p, true);
        }
    }
    for j in 1..=k / 2 {
        for i in 0..p {
            let old = (i + j) % p;
            if !a.has(i, old) || rng.random::<f64>() >= beta {
                continue;
            }
            let free: Vec<usize> = (0..p).filter(|&x| x != i && !a.has(i, x)).collect();
            if free.is_empty() {
                continue;
            }
            let new = free[rng.random_range(0..free.len())];
            a.set(i, old, false);
            a.set(i, new, true);
        }
    }
    a
}

fn barabasi_albert<R: Rng + ?Sized>(p: usize, m: usize, rng: &mut R) -> Adjacency {
    let mut a = Adjacency::empty(p);
    for k in 0..m {
        for l in k + 1..m {
            a.set(k, l, true);
        }
    }
    let mut degree: Vec<usize> = (0..p).map(|k| if k < m { m - 1 } else { 0 }).collect();
    for v in m..p {
        let mut targets: Vec<usize> = Vec::with_capacity(m);
        while targets.len() < m {
            let total: usize = (0..v).filter(|t| !targets.contains(t)).map(|t| degree[t]).sum();
            let pick = if total == 0 {
                let free: Vec<usize> = (0..v).filter(|t| !targets.contains(t)).collect();
                free[rng.random_range(0..free.len())]
            } else {
                let mut x = rng.random_range(0..total);
                let mut chosen = 0;
                for t in (0..v).filter(|t| !targets.contains(t)) {
                    if x < degree[t] {
                        chosen = t;
                        break;
                    }
                    x -= degree[t];
                }
                chosen
            };
            targets.push(pick);
        }
        for &t in &targets {
            a.set(v, t, true);
            degree[t] += 1;
        }
        degree[v] += m;
    }
    a
}

/// Edges removed from and added to the original graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlipRecord {
    pub removed: Vec<(usize, usize)>,
    pub added: Vec<(usize, usize)>,
}

/// Removes `round(fraction |E|)` random edges and adds as many random
/// edges from the original non-edges.
pub fn flip_edges<R: Rng + ?Sized>(
    adj: &Adjacency,
    fraction: f64,
    rng: &mut R,
) -> Result<(Adjacency, FlipRecord)> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Config(format!("flip fraction {fraction} outside [0, 1]")));
    }
    let edges = adj.edges();
    let non_edges = adj.non_edges();
    let r = (fraction * edges.len() as f64).round() as usize;
    if r > non_edges.len() {
        return Err(Error::Config(format!(
            "cannot flip {r} edges: only {} non-edges available",
            non_edges.len()
        )));
    }
    let mut out = adj.clone();
    let mut removed: Vec<(usize, usize)> =
        sample(rng, edges.len(), r).iter().map(|i| edges[i]).collect();
    let mut added: Vec<(usize, usize)> =
        sample(rng, non_edges.len(), r).iter().map(|i| non_edges[i]).collect();
    removed.sort_unstable();
    added.sort_unstable();
    for &(k, l) in &removed {
        out.set(k, l, false);
    }
    for &(k, l) in &added {
        out.set(k, l, true);
    }
    Ok((out, FlipRecord { removed, added }))
}

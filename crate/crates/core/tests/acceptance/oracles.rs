//! Brute-force oracles for graph metrics and the rank AUC.

use bjnl::graphmetrics::{
    characteristic_path_length, clustering_coefficient, global_efficiency, local_efficiency,
    shortest_paths, Adjacency, PathLength,
};
use bjnl::simgen::roc_auc;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::verdict;

const NODES: usize = 12;

fn random_graph<R: Rng>(rng: &mut R) -> Adjacency {
    let q: f64 = rng.random_range(0.05..0.6);
    let mut a = Adjacency::empty(NODES);
    for k in 0..NODES {
        for l in k + 1..NODES {
            if rng.random::<f64>() < q {
                a.set(k, l, true);
            }
        }
    }
    a
}

fn floyd_warshall(a: &Adjacency) -> Vec<Vec<f64>> {
    let p = a.p();
    let mut d = vec![vec![f64::INFINITY; p]; p];
    for k in 0..p {
        d[k][k] = 0.0;
        for l in 0..p {
            if a.has(k, l) {
                d[k][l] = 1.0;
            }
        }
    }
    for m in 0..p {
        for i in 0..p {
            for j in 0..p {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    d
}

fn efficiency_formula(d: &[Vec<f64>]) -> f64 {
    let p = d.len();
    if p < 2 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..p {
        for j in 0..p {
            if i != j && d[i][j].is_finite() {
                s += 1.0 / d[i][j];
            }
        }
    }
    s / (p * (p - 1)) as f64
}

fn sub_distances(a: &Adjacency, nodes: &[usize]) -> Vec<Vec<f64>> {
    let mut sub = Adjacency::empty(nodes.len());
    for (i, &u) in nodes.iter().enumerate() {
        for (j, &v) in nodes.iter().enumerate() {
            if i < j && a.has(u, v) {
                sub.set(i, j, true);
            }
        }
    }
    floyd_warshall(&sub)
}

/// Clustering by enumerating every neighbor pair of every node.
fn clustering_by_triples(a: &Adjacency) -> Vec<f64> {
    (0..a.p())
        .map(|v| {
            let nb: Vec<usize> = (0..a.p()).filter(|&u| u != v && a.has(u, v)).collect();
            let d = nb.len();
            if d < 2 {
                return 0.0;
            }
            let mut closed = 0;
            for i in 0..d {
                for j in i + 1..d {
                    if a.has(nb[i], nb[j]) {
                        closed += 1;
                    }
                }
            }
            2.0 * closed as f64 / (d * (d - 1)) as f64
        })
        .collect()
}

pub fn graph_metric_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut path_mismatch = 0;
    let mut cluster_mismatch = 0;
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let a = random_graph(&mut rng);
        let d = floyd_warshall(&a);
        let sp = shortest_paths(&a);
        for i in 0..NODES {
            for j in 0..NODES {
                if sp[(i, j)] != d[i][j] {
                    path_mismatch += 1;
                }
            }
        }
        let cc = clustering_coefficient(&a);
        let oracle_cc = clustering_by_triples(&a);
        if cc.per_node != oracle_cc {
            cluster_mismatch += 1;
        }

        worst = worst.max((global_efficiency(&a).unwrap() - efficiency_formula(&d)).abs());
        let le = local_efficiency(&a);
        for v in 0..NODES {
            let nb: Vec<usize> = (0..NODES).filter(|&u| a.has(u, v)).collect();
            let expect = if nb.len() < 2 { 0.0 } else { efficiency_formula(&sub_distances(&a, &nb)) };
            worst = worst.max((le.per_node[v] - expect).abs());
        }
        let finite: Vec<f64> = (0..NODES)
            .flat_map(|i| (0..NODES).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| d[i][j])
            .filter(|x| x.is_finite())
            .collect();
        match characteristic_path_length(&a) {
            PathLength::Defined { value, disconnected } => {
                let expect = finite.iter().sum::<f64>() / finite.len() as f64;
                worst = worst.max((value - expect).abs());
                if disconnected != (finite.len() < NODES * (NODES - 1)) {
                    worst = f64::INFINITY;
                }
            }
            PathLength::Undefined => {
                if !finite.is_empty() {
                    worst = f64::INFINITY;
                }
            }
        }
    }
    verdict(
        "graph-metric oracles",
        path_mismatch == 0 && cluster_mismatch == 0 && worst <= 1e-12,
        &format!(
            "200 graphs: {path_mismatch} distance mismatches, {cluster_mismatch} clustering mismatches, max efficiency/path-length error {worst:.2e}"
        ),
    );
}

fn concordance(scores: &[f64], truth: &[bool]) -> Option<f64> {
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..scores.len() {
        for j in 0..scores.len() {
            if truth[i] && !truth[j] {
                den += 1.0;
                if scores[i] > scores[j] {
                    num += 1.0;
                } else if scores[i] == scores[j] {
                    num += 0.5;
                }
            }
        }
    }
    (den > 0.0).then(|| num / den)
}

pub fn auc_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut worst: f64 = 0.0;
    let mut class_mismatch = 0;
    for _ in 0..1000 {
        let n = rng.random_range(2..60);
        // a coarse score grid forces ties
        let levels = rng.random_range(1..12);
        let scores: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 / 4.0).collect();
        let truth: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
        match (roc_auc(&scores, &truth).unwrap(), concordance(&scores, &truth)) {
            (Some(a), Some(b)) => worst = worst.max((a - b).abs()),
            (None, None) => {}
            _ => class_mismatch += 1,
        }
    }
    verdict(
        "AUC oracle",
        worst <= 1e-12 && class_mismatch == 0,
        &format!("1000 sets with ties: max |AUC - concordance| {worst:.2e}, {class_mismatch} definedness mismatches"),
    );
}

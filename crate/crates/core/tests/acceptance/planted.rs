//! Planted-truth simulations for the differential-edge test and for metric
//! posteriors.

use bjnl::graphmetrics::{metric_posteriors, Adjacency, Metric};
use bjnl::inference::differential_strength_test;
use bjnl::model::partial_correlations;
use bjnl::sampler::rng::keyed_stream;
use bjnl::simgen::{build_precision, gen_network, sample_data, shift_to_floor, Family, NetworkParams};
use bjnl::{run_chain, ConditionData, Hyperparams};
use nalgebra::DMatrix;
use rand::seq::IndexedRandom;

use crate::report::verdict;

const REPLICATES: usize = 20;
const P: usize = 40;

fn hyperparams(r: usize) -> Hyperparams {
    Hyperparams {
        n_burnin: 500,
        n_iter: 2000,
        seed: 500 + r as u64,
        ..Hyperparams::default()
    }
}

fn data_for(precisions: &[DMatrix<f64>], seed: u64) -> Vec<ConditionData> {
    let labels = vec!["c1".to_string(), "c2".to_string()];
    let mut rngs: Vec<_> = labels.iter().map(|l| keyed_stream(seed, &format!("data/{l}"))).collect();
    sample_data(&labels, precisions, 10, 100, &mut rngs).unwrap()
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Condition 2 equals condition 1 except for one pair whose partial
/// correlation moves from 0 to 0.4.
fn planted_pair(seed: u64) -> (Vec<DMatrix<f64>>, (usize, usize), f64) {
    let mut rng = keyed_stream(seed, "planted");
    let adj = gen_network(Family::ErdosRenyi, P, &NetworkParams::default(), &mut rng).unwrap();
    let omega1 = build_precision(&adj, &mut rng, 0.1);
    let candidates = adj.non_edges();
    loop {
        let &(k, l) = candidates.choose(&mut rng).unwrap();
        let mut omega2 = omega1.clone();
        let w = -0.4 * (omega1[(k, k)] * omega1[(l, l)]).sqrt();
        omega2[(k, l)] = w;
        omega2[(l, k)] = w;
        if min_eigenvalue(&omega2) > 0.05 {
            let r1 = partial_correlations(&omega1).unwrap();
            let r2 = partial_correlations(&omega2).unwrap();
            return (vec![omega1, omega2], (k, l), (r1[(k, l)] - r2[(k, l)]).abs());
        }
    }
}

pub fn planted_differential_edge() {
    let mut hits = 0;
    let mut smallest_delta = f64::INFINITY;
    let mut other_flags = 0;
    for r in 0..REPLICATES {
        let seed = 9000 + r as u64;
        let (omegas, (k, l), delta) = planted_pair(seed);
        smallest_delta = smallest_delta.min(delta);
        let data = data_for(&omegas, seed);
        let archive = run_chain(&data, &hyperparams(r)).unwrap();
        let report = differential_strength_test(&archive, 0, 1, 0.01, false).unwrap();
        for e in &report.edges {
            if (e.k, e.l) == (k, l) {
                if e.significant {
                    hits += 1;
                }
            } else if e.significant {
                other_flags += 1;
            }
        }
    }
    let needed = (0.95 * REPLICATES as f64).ceil() as usize;
    verdict(
        "planted differential edge",
        hits >= needed && smallest_delta >= 0.3,
        &format!(
            "planted edge (|delta rho| >= {smallest_delta:.2}) flagged at adjusted p < 0.01 in {hits}/{REPLICATES} replicates (need {needed}); {other_flags} other edges flagged in total"
        ),
    );
}

/// Condition 2's network is condition 1's plus 20% extra edges, with shared
/// edges carrying the same weights.
fn planted_topology(seed: u64) -> Vec<DMatrix<f64>> {
    let mut rng = keyed_stream(seed, "topology");
    let adj1 = gen_network(Family::ErdosRenyi, P, &NetworkParams::default(), &mut rng).unwrap();
    let extra = (0.2 * adj1.n_edges() as f64).round() as usize;
    let added: Vec<(usize, usize)> =
        adj1.non_edges().choose_multiple(&mut rng, extra).copied().collect();
    let mut adj2: Adjacency = adj1.clone();
    for &(k, l) in &added {
        adj2.set(k, l, true);
    }
    let omega2 = build_precision(&adj2, &mut rng, 0.1);
    let mut omega1 = omega2.clone();
    for &(k, l) in &added {
        omega1[(k, l)] = 0.0;
        omega1[(l, k)] = 0.0;
    }
    vec![shift_to_floor(omega1, 0.1), omega2]
}

pub fn planted_topology_dominance() {
    let mut hits = 0;
    let mut reversed = 0;
    for r in 0..REPLICATES {
        let seed = 7000 + r as u64;
        let data = data_for(&planted_topology(seed), seed);
        let hp = hyperparams(r);
        let archive = run_chain(&data, &hp).unwrap();
        let post = metric_posteriors(&archive, hp.edge_threshold, &[Metric::GlobalEfficiency]).unwrap();
        let ge = &post[0];
        let (m1, m2) = (mean(&ge.defined(0)), mean(&ge.defined(1)));
        let significant = ge.pairs[0].ks.p_value().is_some_and(|p| p < 0.05);
        if significant && m2 > m1 {
            hits += 1;
        }
        if m2 <= m1 {
            reversed += 1;
        }
    }
    let needed = (0.95 * REPLICATES as f64).ceil() as usize;
    verdict(
        "planted topology dominance",
        hits >= needed,
        &format!(
            "condition 2 global efficiency above condition 1 with KS p < 0.05 in {hits}/{REPLICATES} replicates (need {needed}); {reversed} reversed"
        ),
    );
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

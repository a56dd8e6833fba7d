//! Prior recovery: with no observations the chain must reproduce moments of
//! the prior, which is sampled directly by forward simulation of the
//! hierarchy and rejection of draws that are not positive definite.

use bjnl::inference::stats::{mcse, mean_var};
use bjnl::model::{logistic_link, t_link_scale, EdgeIndex};
use bjnl::{run_chain, ConditionData, Hyperparams, Link};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, Gamma, Normal};
use rayon::prelude::*;

use crate::report::verdict;

const P: usize = 5;
const G: usize = 2;
const DRAWS: usize = 20_000;
const FORWARD: usize = 100_000;

struct PriorDraw {
    omega: Vec<DMatrix<f64>>,
    delta: Vec<Vec<bool>>,
    w: Vec<Vec<f64>>,
}

/// Chinese-restaurant draw of the atom value attached to each of `n` items.
fn crp_values<R: Rng>(n: usize, m: f64, sd: f64, rng: &mut R) -> Vec<f64> {
    let base = Normal::new(0.0, sd).unwrap();
    let mut tables: Vec<(f64, usize)> = Vec::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = rng.random::<f64>() * (i as f64 + m);
        let mut acc = 0.0;
        let mut pick = None;
        for (t, &(_, count)) in tables.iter().enumerate() {
            acc += count as f64;
            if r < acc {
                pick = Some(t);
                break;
            }
        }
        let t = match pick {
            Some(t) => t,
            None => {
                tables.push((base.sample(rng), 0));
                tables.len() - 1
            }
        };
        tables[t].1 += 1;
        out.push(tables[t].0);
    }
    out
}

fn forward_draw<R: Rng>(hp: &Hyperparams, edges: &EdgeIndex, rng: &mut R) -> Option<PriorDraw> {
    let ne = edges.len();
    let m = Gamma::new(hp.a_m, 1.0 / hp.b_m).unwrap().sample(rng);
    let sd = hp.sigma_eta_sq.sqrt();
    let shared = crp_values(ne, m, sd, rng);
    let diag = Exp::new(hp.alpha / 2.0).unwrap();
    let spike = Exp::new(0.5 * hp.lambda0 * hp.lambda0).unwrap();
    let slab = Gamma::new(hp.a_tau, 1.0 / hp.b_tau).unwrap();
    let mix = Gamma::new(hp.phi / 2.0, 2.0 / hp.phi).unwrap();
    let mut draw = PriorDraw { omega: vec![], delta: vec![], w: vec![] };
    for _ in 0..G {
        let own = crp_values(ne, m, sd, rng);
        let mut omega = DMatrix::zeros(P, P);
        let mut delta = Vec::with_capacity(ne);
        let mut w = Vec::with_capacity(ne);
        for (e, &(k, l)) in edges.pairs().iter().enumerate() {
            let mu = shared[e] + own[e];
            w.push(logistic_link(mu, 0.0));
            let var = match hp.link {
                Link::Logistic => t_link_scale(hp.phi) / mix.sample(rng),
                Link::Probit => 1.0,
            };
            let u = mu + var.sqrt() * rng.sample::<f64, _>(rand_distr::StandardNormal);
            let on = u > 0.0;
            let v = if on { 1.0 / slab.sample(rng) } else { spike.sample(rng) };
            let x = v.sqrt() * rng.sample::<f64, _>(rand_distr::StandardNormal);
            omega[(k, l)] = x;
            omega[(l, k)] = x;
            delta.push(on);
        }
        for j in 0..P {
            omega[(j, j)] = diag.sample(rng);
        }
        if omega.clone().cholesky().is_none() {
            return None;
        }
        draw.omega.push(omega);
        draw.delta.push(delta);
        draw.w.push(w);
    }
    Some(draw)
}

struct Moments {
    mean: f64,
    se: f64,
}

fn iid_moments(xs: &[f64]) -> Moments {
    let (m, v) = mean_var(xs);
    Moments { mean: m, se: (v / xs.len() as f64).sqrt() }
}

fn chain_moments(xs: &[f64]) -> Moments {
    let (m, _) = mean_var(xs);
    Moments { mean: m, se: mcse(xs) }
}

fn squared_deviation(xs: &[f64]) -> Vec<f64> {
    let (m, _) = mean_var(xs);
    xs.iter().map(|x| (x - m) * (x - m)).collect()
}

pub fn prior_recovery() {
    let hp = Hyperparams {
        n_burnin: 2_000,
        n_iter: DRAWS,
        seed: 11,
        ..Hyperparams::default()
    };
    let data: Vec<ConditionData> =
        (0..G).map(|g| ConditionData::empty(format!("c{}", g + 1), P)).collect();
    let archive = run_chain(&data, &hp).unwrap();
    let edges = EdgeIndex::new(P);
    let ne = edges.len();

    // independent seeded chunks keep the result independent of thread count
    const CHUNKS: usize = 16;
    let chunks: Vec<(Vec<PriorDraw>, usize)> = (0..CHUNKS)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + c as u64);
            let mut out = Vec::with_capacity(FORWARD / CHUNKS);
            let mut tried = 0;
            while out.len() < FORWARD / CHUNKS {
                tried += 1;
                if let Some(d) = forward_draw(&hp, &edges, &mut rng) {
                    out.push(d);
                }
            }
            (out, tried)
        })
        .collect();
    let tried: usize = chunks.iter().map(|c| c.1).sum();
    let accepted: usize = chunks.iter().map(|c| c.0.len()).sum();
    let mut fwd_omega = vec![vec![Vec::with_capacity(accepted); ne]; G];
    let mut fwd_delta = vec![vec![Vec::with_capacity(accepted); ne]; G];
    let mut fwd_w = vec![vec![Vec::with_capacity(accepted); ne]; G];
    for d in chunks.iter().flat_map(|c| &c.0) {
        for g in 0..G {
            for (e, &(k, l)) in edges.pairs().iter().enumerate() {
                fwd_omega[g][e].push(d.omega[g][(k, l)]);
                fwd_delta[g][e].push(if d.delta[g][e] { 1.0 } else { 0.0 });
                fwd_w[g][e].push(d.w[g][e]);
            }
        }
    }

    let mut worst = 0.0_f64;
    let mut worst_name = String::new();
    let mut n_checks = 0;
    let mut failures = 0;
    for g in 0..G {
        for (e, &(k, l)) in edges.pairs().iter().enumerate() {
            let omega: Vec<f64> = archive.omega_series(g, k, l).to_vec();
            let delta: Vec<f64> = archive.delta_series(g, e).iter().map(|&d| d as f64).collect();
            let w: Vec<f64> = archive.weight_series(g, e).to_vec();
            let checks = [
                ("mean omega", chain_moments(&omega), iid_moments(&fwd_omega[g][e])),
                (
                    "var omega",
                    chain_moments(&squared_deviation(&omega)),
                    iid_moments(&squared_deviation(&fwd_omega[g][e])),
                ),
                ("mean delta", chain_moments(&delta), iid_moments(&fwd_delta[g][e])),
                ("mean w", chain_moments(&w), iid_moments(&fwd_w[g][e])),
            ];
            for (name, c, f) in checks {
                let z = (c.mean - f.mean).abs() / (c.se * c.se + f.se * f.se).sqrt();
                n_checks += 1;
                if z > 3.0 {
                    failures += 1;
                }
                if z > worst {
                    worst = z;
                    worst_name = format!("{name} g={g} ({k},{l})");
                }
            }
        }
    }
    verdict(
        "prior recovery",
        failures == 0,
        &format!(
            "{n_checks} moments, {failures} beyond 3 MCSE, worst |z| = {worst:.2} ({worst_name}); forward acceptance {:.3}",
            accepted as f64 / tried as f64
        ),
    );
}

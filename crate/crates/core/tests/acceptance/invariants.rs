//! Structural invariants of the sampler and its building blocks.

use bjnl::graphmetrics::Adjacency;
use bjnl::inference::stats::benjamini_hochberg;
use bjnl::model::{log_spike_density, logistic_link};
use bjnl::simgen::flip_edges;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::benchmark::{benchmark, REPLICATES};
use crate::quadrature::{gauss_legendre, log_integral};
use crate::report::verdict;

pub fn positive_definite_every_sweep() {
    let b = benchmark();
    let runs: Vec<_> = b.logistic.iter().chain(&b.probit).collect();
    let expected: usize = runs.iter().map(|r| r.sweeps * 2).sum();
    let checked: usize = runs.iter().map(|r| r.pd_checks).sum();
    verdict(
        "positive definiteness",
        checked == expected && runs.len() == 2 * REPLICATES,
        &format!("{} runs, {checked} of {expected} condition-sweeps passed the Cholesky check, 0 violations", runs.len()),
    );
}

pub fn flip_count_preservation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut bad = 0;
    let mut trials = 0;
    for _ in 0..300 {
        let p = rng.random_range(5..30);
        let q = rng.random_range(0.05..0.4);
        let mut a = Adjacency::empty(p);
        for k in 0..p {
            for l in k + 1..p {
                if rng.random::<f64>() < q {
                    a.set(k, l, true);
                }
            }
        }
        for f in [0.25, 0.5, 0.75] {
            let r = (f * a.n_edges() as f64).round() as usize;
            let Ok((b, rec)) = flip_edges(&a, f, &mut rng) else {
                if r <= a.non_edges().len() {
                    bad += 1;
                }
                continue;
            };
            trials += 1;
            let ok = b.n_edges() == a.n_edges()
                && rec.removed.len() == r
                && rec.added.len() == r
                && rec.removed.iter().all(|&(k, l)| a.has(k, l) && !b.has(k, l))
                && rec.added.iter().all(|&(k, l)| !a.has(k, l) && b.has(k, l))
                && a.xor(&b).n_edges() == 2 * r;
            if !ok {
                bad += 1;
            }
        }
    }
    verdict(
        "flip count preservation",
        bad == 0 && trials > 0,
        &format!("{trials} flips: {bad} violations"),
    );
}

pub fn double_exponential_scale_mixture() {
    let rule = gauss_legendre(16);
    let mut worst: f64 = 0.0;
    for lambda in [1.0_f64, 10.0, 100.0] {
        for x in [0.0_f64, 0.05, 0.5] {
            // int N(x; 0, s) Exp(s; lambda^2 / 2) ds with s = e^t
            let rate = 0.5 * lambda * lambda;
            let ln_mix = log_integral(
                |t| {
                    let s = t.exp();
                    -0.5 * (2.0 * std::f64::consts::PI * s).ln() - 0.5 * x * x / s + rate.ln() - rate * s + t
                },
                -90.0,
                8.0,
                4000,
                &rule,
            );
            let de = log_spike_density(x, lambda).unwrap();
            worst = worst.max((ln_mix.exp() - de.exp()).abs() / de.exp());
        }
    }
    verdict(
        "double-exponential scale mixture",
        worst <= 1e-6,
        &format!("max relative error {worst:.2e} over lambda in {{1, 10, 100}}, x in {{0, 0.05, 0.5}}"),
    );
}

pub fn logistic_shift_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for _ in 0..100_000 {
        let a: f64 = rng.random_range(-20.0..20.0);
        let b: f64 = rng.random_range(-20.0..20.0);
        let c: f64 = rng.random_range(-20.0..20.0);
        worst = worst.max((logistic_link(a + c, b - c) - logistic_link(a, b)).abs());
    }
    // only the rounding of the shifted sum can differ
    let tol = 64.0 * f64::EPSILON;
    verdict(
        "logistic shift invariance",
        worst <= tol,
        &format!("max |h(a+c, b-c) - h(a, b)| = {worst:.2e} (<= {tol:.2e})"),
    );
}

pub fn bh_monotonicity() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut bad = 0;
    for _ in 0..1000 {
        let n = rng.random_range(1..80);
        let p: Vec<f64> = (0..n)
            .map(|_| if rng.random::<f64>() < 0.3 { rng.random::<f64>() * 1e-3 } else { rng.random::<f64>() })
            .collect();
        let adj = benjamini_hochberg(&p);
        for i in 0..n {
            if adj[i] < p[i] || adj[i] > 1.0 {
                bad += 1;
            }
            for j in 0..n {
                if p[i] <= p[j] && adj[i] > adj[j] {
                    bad += 1;
                }
            }
        }
    }
    verdict("BH monotonicity", bad == 0, &format!("1000 p-value sets: {bad} order violations"));
}

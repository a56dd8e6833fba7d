//! Two-node posterior inclusion probability against deterministic quadrature.
//!
//! With one edge the indicator has prior probability 1/2 (the predictor's
//! prior is symmetric about zero and every link is odd about 1/2), so
//!
//! ```text
//! P(delta = 1 | S) = I1 / (I1 + I0)
//! I_d = int_{PD} |Omega|^{n/2} exp(-tr((S + alpha I) Omega) / 2) f_d(omega12)
//! ```
//!
//! with `f_1` the Student-t slab marginal and `f_0` the double-exponential
//! spike. Substituting `omega22 = gamma + omega12^2 / omega11` maps the PD
//! cone onto `(0, inf)^2 x R`.

use bjnl::inference::inclusion_probabilities;
use bjnl::inference::stats::mcse;
use bjnl::{run_chain, ConditionData, Hyperparams};
use nalgebra::{DMatrix, Matrix2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::report::verdict;

const N: usize = 500;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let step = p1 / dp;
            x -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// `ln int_lo^hi exp(f(t)) dt` by composite Gauss-Legendre.
pub fn log_integral(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize, rule: &[(f64, f64)]) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut terms = Vec::with_capacity(panels * rule.len());
    for i in 0..panels {
        let mid = lo + (i as f64 + 0.5) * h;
        for &(x, w) in rule {
            terms.push((0.5 * h * w).ln() + f(mid + 0.5 * h * x));
        }
    }
    log_sum_exp(&terms)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

fn ln_slab(x: f64, a: f64, b: f64) -> f64 {
    ln_gamma(a + 0.5) - ln_gamma(a) - 0.5 * (2.0 * std::f64::consts::PI * b).ln()
        - (a + 0.5) * (1.0 + x * x / (2.0 * b)).ln()
}

fn ln_spike(x: f64, lambda: f64) -> f64 {
    (0.5 * lambda).ln() - lambda * x.abs()
}

pub fn oracle_inclusion(s: &Matrix2<f64>, n: usize, hp: &Hyperparams) -> f64 {
    let rule = gauss_legendre(16);
    let (c1, c2, s12) = (s[(0, 0)] + hp.alpha, s[(1, 1)] + hp.alpha, s[(0, 1)]);
    let half_n = n as f64 / 2.0;
    // gamma integral, identical for both indicators; kept for completeness
    let g_mode = (2.0 * half_n / c2).ln();
    let ln_gamma_part = log_integral(
        |t| (half_n + 1.0) * t - 0.5 * c2 * t.exp(),
        g_mode - 3.0,
        g_mode + 3.0,
        60,
        &rule,
    );
    let a_mode = (2.0 * half_n / c1).ln();
    let ln_a_part = |x: f64| {
        log_integral(
            |t| {
                let a = t.exp();
                (half_n + 1.0) * t - 0.5 * c1 * a - 0.5 * c2 * x * x / a
            },
            a_mode - 3.0,
            a_mode + 3.0,
            60,
            &rule,
        )
    };
    let outer = |ln_f: &dyn Fn(f64) -> f64| {
        // symmetric panels put the spike's kink on a panel boundary
        log_integral(|x| -s12 * x + ln_a_part(x) + ln_f(x), -2.0, 2.0, 1600, &rule) + ln_gamma_part
    };
    let ln_i1 = outer(&|x| ln_slab(x, hp.a_tau, hp.b_tau));
    let ln_i0 = outer(&|x| ln_spike(x, hp.lambda0));
    1.0 / (1.0 + (ln_i0 - ln_i1).exp())
}

fn scatter_for(rho: f64, seed: u64) -> Matrix2<f64> {
    let omega = Matrix2::new(1.0, rho, rho, 1.0);
    let l = omega.cholesky().unwrap().l();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = Matrix2::zeros();
    for _ in 0..N {
        let z = nalgebra::Vector2::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng));
        let y = l.transpose().solve_upper_triangular(&z).unwrap();
        s += y * y.transpose();
    }
    s
}

pub fn quadrature_rule_integrates_known_functions() {
    let rule = gauss_legendre(16);
    let ln_gauss = log_integral(|x| -0.5 * x * x, -12.0, 12.0, 40, &rule);
    let e1 = (ln_gauss - (2.0 * std::f64::consts::PI).sqrt().ln()).abs();
    let e2 = log_integral(|x| ln_spike(x, 100.0), -1.0, 1.0, 400, &rule).abs();
    verdict(
        "quadrature rule",
        e1 < 1e-12 && e2 < 1e-12,
        &format!("log-integral errors: Gaussian {e1:.1e}, double exponential {e2:.1e}"),
    );
}

pub fn inclusion_matches_quadrature() {
    let mut lines = Vec::new();
    let mut pass = true;
    for (r, &rho) in [0.0, 0.3, 0.6].iter().enumerate() {
        let s = scatter_for(rho, 40 + r as u64);
        let oracle = oracle_inclusion(&s, N, &Hyperparams::default());
        let hp = Hyperparams {
            n_burnin: 2_000,
            n_iter: 100_000,
            seed: 7 + r as u64,
            ..Hyperparams::default()
        };
        let data = [ConditionData::new("c1", DMatrix::from_iterator(2, 2, s.iter().cloned()), N).unwrap()];
        let archive = run_chain(&data, &hp).unwrap();
        let chain = inclusion_probabilities(&archive).unwrap()[0][(0, 1)];
        let deltas: Vec<f64> = archive.delta_series(0, 0).iter().map(|&d| d as f64).collect();
        let ok = (chain - oracle).abs() <= 0.02;
        pass &= ok;
        lines.push(format!(
            "omega12={rho}: chain {chain:.4} (mcse {:.4}) oracle {oracle:.4}",
            mcse(&deltas)
        ));
    }
    verdict("quadrature oracle", pass, &lines.join("; "));
}

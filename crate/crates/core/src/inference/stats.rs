//! Small frequentist toolbox used on MCMC output.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

/// Mean and unbiased variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let ss = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (mean, ss / (n - 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub statistic: f64,
    pub df: f64,
    pub p_value: f64,
}

/// Two-sided one-sample t-test of `xs` against zero. `n_eff` replaces the
/// sample size in the standard error and degrees of freedom when given.
/// Returns `None` with fewer than two observations.
pub fn one_sample_t(xs: &[f64], n_eff: Option<f64>) -> Option<TTest> {
    if xs.len() < 2 {
        return None;
    }
    let (mean, var) = mean_var(xs);
    let n = n_eff.unwrap_or(xs.len() as f64).max(2.0);
    let df = n - 1.0;
    if var <= 0.0 {
        return Some(if mean == 0.0 {
            TTest { statistic: 0.0, df, p_value: 1.0 }
        } else {
            TTest { statistic: mean.signum() * f64::INFINITY, df, p_value: 0.0 }
        });
    }
    let t = mean / (var / n).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df positive");
    let p_value = (2.0 * dist.cdf(-t.abs())).min(1.0);
    Some(TTest { statistic: t, df, p_value })
}

/// Benjamini-Hochberg step-up adjusted p-values, in input order.
pub fn benjamini_hochberg(p: &[f64]) -> Vec<f64> {
    let m = p.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| p[a].total_cmp(&p[b]));
    let mut adjusted = vec![0.0; m];
    let mut running = 1.0f64;
    for (rank, &i) in order.iter().enumerate().rev() {
        running = running.min(p[i] * m as f64 / (rank + 1) as f64);
        adjusted[i] = running.min(1.0).max(p[i]);
    }
    adjusted
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=200 {
        let jf = j as f64;
        let term = sign * (-2.0 * jf * jf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Option<KsTest> {
    if a.is_empty() || b.is_empty() {
        return None;
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let en = (n as f64 * m as f64 / (n + m) as f64).sqrt();
    let p_value = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    Some(KsTest { statistic: d, p_value })
}

/// Effective sample size by Geyer's initial positive sequence.
pub fn effective_sample_size(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 3 {
        return n as f64;
    }
    let (mean, _) = mean_var(xs);
    let c: Vec<f64> = xs.iter().map(|x| x - mean).collect();
    let gamma0 = c.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if gamma0 <= 0.0 {
        return n as f64;
    }
    let acov = |lag: usize| -> f64 {
        c[..n - lag].iter().zip(&c[lag..]).map(|(a, b)| a * b).sum::<f64>() / n as f64
    };
    let mut tau = -gamma0;
    let mut k = 0;
    while 2 * k + 1 < n {
        let pair = acov(2 * k) + acov(2 * k + 1);
        if pair <= 0.0 {
            break;
        }
        tau += 2.0 * pair;
        k += 1;
    }
    let ess = n as f64 * gamma0 / tau.max(1e-300);
    ess.min(n as f64 * (n as f64).log10().max(1.0))
}

/// Monte Carlo standard error of the mean using the effective sample size.
pub fn mcse(xs: &[f64]) -> f64 {
    let (_, var) = mean_var(xs);
    (var / effective_sample_size(xs)).sqrt()
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

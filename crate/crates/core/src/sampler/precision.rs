//! Column-wise block update of one condition's precision matrix.
//!
//! Column `j` is treated as the last row/column of the matrix. Writing
//! `beta = Omega[-j, j]` and `gamma = omega_jj - beta^T Omega11^{-1} beta`,
//! the full conditionals factor into
//!
//! ```text
//! gamma | .  ~ Gamma(n/2 + 1, rate (S_jj + alpha) / 2)
//! beta  | .  ~ N(-C s12, C),  C = ((S_jj + alpha) Omega11^{-1} + D_v^{-1})^{-1}
//! ```
//!
//! where `D_v` holds the current spike or slab variance of each edge. Any
//! `gamma > 0` keeps the matrix positive definite. The inverse `Sigma` is
//! carried along with rank-one updates so `Omega11^{-1}` costs `O(p^2)`
//! per column.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, NumericalContext, Result};
use crate::model::{ConditionData, EdgeIndex, Hyperparams, IndicatorScheme, PrecisionState};

/// Log prior odds inputs for each edge's indicator: `ln P(delta = 1)` and
/// `ln P(delta = 0)`.
#[derive(Debug, Clone)]
pub struct EdgePriors {
    pub ln_on: Vec<f64>,
    pub ln_off: Vec<f64>,
}

impl EdgePriors {
    pub fn from_probabilities(w: &[f64]) -> Self {
        Self {
            ln_on: w.iter().map(|x| x.ln()).collect(),
            ln_off: w.iter().map(|x| (1.0 - x).ln()).collect(),
        }
    }
}

/// Shape and rate of the `gamma` full conditional.
pub fn gamma_conditional(n_obs: usize, s_jj: f64, alpha: f64) -> (f64, f64) {
    (n_obs as f64 / 2.0 + 1.0, (s_jj + alpha) / 2.0)
}

/// Log marginal of a Gaussian coordinate with curvature `a` and linear term
/// `b` under a `N(0, v)` prior, up to a constant shared by every `v`.
#[inline]
fn ln_coordinate_marginal(a: f64, b: f64, v: f64) -> f64 {
    let av = 1.0 + a * v;
    -0.5 * av.ln() + 0.5 * b * b * v / av
}

#[inline]
fn bernoulli_from_logits<R: Rng + ?Sized>(l1: f64, l0: f64, rng: &mut R) -> bool {
    let d = l0 - l1;
    // P(on) = 1 / (1 + exp(l0 - l1))
    let p_on = if d > 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    };
    rng.random::<f64>() < p_on
}

fn numerical(condition: usize, column: usize, detail: &str) -> Error {
    Error::Numerical {
        context: NumericalContext {
            condition,
            column,
            iteration: None,
        },
        detail: detail.to_string(),
    }
}

/// One sweep over all columns of `state`.
pub fn update_precision<R: Rng + ?Sized>(
    condition: usize,
    state: &mut PrecisionState,
    data: &ConditionData<f64>,
    priors: &EdgePriors,
    hp: &Hyperparams,
    edges: &EdgeIndex,
    rng: &mut R,
) -> Result<()> {
    let p = state.p();
    let m = p - 1;
    let mut others = Vec::with_capacity(m);
    let mut omega11_inv = DMatrix::<f64>::zeros(m, m);
    let mut sigma12 = DVector::<f64>::zeros(m);
    let mut s12 = DVector::<f64>::zeros(m);
    let mut beta = DVector::<f64>::zeros(m);
    let mut edge_ids = vec![0usize; m];

    for j in 0..p {
        others.clear();
        others.extend((0..p).filter(|&k| k != j));
        let sigma22 = state.sigma[(j, j)];
        for (i, &k) in others.iter().enumerate() {
            sigma12[i] = state.sigma[(k, j)];
            s12[i] = data.scatter[(k, j)];
            beta[i] = state.omega[(k, j)];
            edge_ids[i] = edges.index(k, j);
        }
        for (c, &kc) in others.iter().enumerate() {
            for (r, &kr) in others.iter().enumerate() {
                omega11_inv[(r, c)] = state.sigma[(kr, kc)] - sigma12[r] * sigma12[c] / sigma22;
            }
        }
        let c0 = data.scatter[(j, j)] + hp.alpha;

        if hp.indicator_scheme == IndicatorScheme::ColumnMarginal {
            // a_beta = A beta with A = c0 * Omega11^{-1}
            let mut a_beta = &omega11_inv * &beta * c0;
            for i in 0..m {
                let e = edge_ids[i];
                let a = c0 * omega11_inv[(i, i)];
                let b = -s12[i] - (a_beta[i] - a * beta[i]);
                let v_on = 1.0 / state.tau_slab[e];
                let v_off = state.tau_spike_var[e];
                let l1 = priors.ln_on[e] + ln_coordinate_marginal(a, b, v_on);
                let l0 = priors.ln_off[e] + ln_coordinate_marginal(a, b, v_off);
                let on = bernoulli_from_logits(l1, l0, rng);
                state.delta[e] = on;
                let v = if on { v_on } else { v_off };
                let prec = a + 1.0 / v;
                let z: f64 = StandardNormal.sample(rng);
                let new = b / prec + z / prec.sqrt();
                let shift = new - beta[i];
                if shift != 0.0 {
                    for r in 0..m {
                        a_beta[r] += c0 * omega11_inv[(r, i)] * shift;
                    }
                }
                beta[i] = new;
            }
        }

        // joint draw of the column given the indicators
        let mut q = &omega11_inv * c0;
        for i in 0..m {
            q[(i, i)] += 1.0 / state.edge_variance(edge_ids[i]);
        }
        let chol = q
            .cholesky()
            .ok_or_else(|| numerical(condition, j, "column conditional covariance not positive definite"))?;
        let mean = -chol.solve(&s12);
        let z = DVector::<f64>::from_fn(m, |_, _| StandardNormal.sample(rng));
        let noise = chol
            .l()
            .tr_solve_lower_triangular(&z)
            .ok_or_else(|| numerical(condition, j, "singular Cholesky factor"))?;
        beta = mean + noise;

        let (shape, rate) = gamma_conditional(data.n_obs, data.scatter[(j, j)], hp.alpha);
        let gamma = Gamma::new(shape, 1.0 / rate)
            .map_err(|_| numerical(condition, j, "invalid gamma conditional"))?
            .sample(rng);
        if !(gamma > 0.0) || !beta.iter().all(|x| x.is_finite()) {
            return Err(numerical(condition, j, "non-finite column draw"));
        }

        let cvec = &omega11_inv * &beta;
        let quad = beta.dot(&cvec);
        for (i, &k) in others.iter().enumerate() {
            state.omega[(k, j)] = beta[i];
            state.omega[(j, k)] = beta[i];
        }
        state.omega[(j, j)] = gamma + quad;
        for (c, &kc) in others.iter().enumerate() {
            for (r, &kr) in others.iter().enumerate() {
                state.sigma[(kr, kc)] = omega11_inv[(r, c)] + cvec[r] * cvec[c] / gamma;
            }
            state.sigma[(kc, j)] = -cvec[c] / gamma;
            state.sigma[(j, kc)] = -cvec[c] / gamma;
        }
        state.sigma[(j, j)] = 1.0 / gamma;
    }

    refresh_inverse(condition, state)
}

/// Recomputes `Sigma = Omega^{-1}` from a fresh Cholesky factorization, which
/// doubles as the positive-definiteness check after every sweep.
pub fn refresh_inverse(condition: usize, state: &mut PrecisionState) -> Result<()> {
    let p = state.p();
    let chol = state
        .omega
        .clone()
        .cholesky()
        .ok_or_else(|| numerical(condition, p, "precision matrix lost positive definiteness"))?;
    state.sigma = chol.inverse();
    Ok(())
}

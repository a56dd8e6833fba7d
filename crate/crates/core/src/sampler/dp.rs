//! Slice-sampled stick-breaking updates of one Dirichlet-process component.
//!
//! Each edge contributes a Gaussian pseudo-likelihood for its atom,
//! `exp(-prec_e eta^2 / 2 + lin_e eta)`, accumulated from the latent
//! residuals of every condition the component touches.

use rand::Rng;
use rand_distr::{Beta, Distribution, Normal, Open01};

use crate::error::{Error, Result};
use crate::model::{DpComponentState, Hyperparams};

/// Components beyond this count signal a mis-set concentration or base
/// variance.
pub const MAX_COMPONENTS: usize = 10_000;

/// Per-edge sufficient statistics of the atom likelihood.
#[derive(Debug, Clone, Default)]
pub struct AtomEvidence {
    pub prec: Vec<f64>,
    pub lin: Vec<f64>,
}

impl AtomEvidence {
    pub fn zeros(n_edges: usize) -> Self {
        Self {
            prec: vec![0.0; n_edges],
            lin: vec![0.0; n_edges],
        }
    }

    /// Adds observations `residual[e]` with variance `variance[e]`.
    pub fn add(&mut self, residual: &[f64], variance: &[f64]) {
        for e in 0..self.prec.len() {
            self.prec[e] += 1.0 / variance[e];
            self.lin[e] += residual[e] / variance[e];
        }
    }
}

/// Normal posterior (mean, variance) of an atom with prior `N(0, prior_var)`
/// and Gaussian observations `(value, variance)`.
pub fn atom_posterior(prior_var: f64, obs: impl IntoIterator<Item = (f64, f64)>) -> (f64, f64) {
    let mut prec = 1.0 / prior_var;
    let mut lin = 0.0;
    for (r, v) in obs {
        prec += 1.0 / v;
        lin += r / v;
    }
    (lin / prec, 1.0 / prec)
}

/// Beta parameters of every stick given the cluster counts.
pub fn stick_conditionals(counts: &[usize], concentration: f64) -> Vec<(f64, f64)> {
    let mut tail: usize = counts.iter().sum();
    counts
        .iter()
        .map(|&n| {
            tail -= n;
            (1.0 + n as f64, concentration + tail as f64)
        })
        .collect()
}

fn clamp_stick(v: f64) -> f64 {
    v.clamp(f64::MIN_POSITIVE, 1.0 - f64::EPSILON)
}

fn draw_stick<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let beta = Beta::new(a, b).map_err(|e| Error::Divergence(format!("stick Beta({a}, {b}): {e}")))?;
    Ok(clamp_stick(beta.sample(rng)))
}

/// Draws the initial single-atom state with every edge assigned to it.
pub fn init_component<R: Rng + ?Sized>(
    n_edges: usize,
    concentration: f64,
    hp: &Hyperparams,
    rng: &mut R,
) -> Result<DpComponentState> {
    let atom = Normal::new(0.0, hp.sigma_eta_sq.sqrt())
        .expect("positive variance")
        .sample(rng);
    let v = draw_stick(1.0, concentration, rng)?;
    Ok(DpComponentState {
        atoms: vec![atom],
        sticks: vec![v],
        assignments: vec![0; n_edges],
        slice_vars: vec![0.5 * v; n_edges],
    })
}

/// One slice-sampler pass: slices, lazy extension, reassignment, sticks,
/// atoms.
pub fn update_dp_component<R: Rng + ?Sized>(
    comp: &mut DpComponentState,
    evidence: &AtomEvidence,
    concentration: f64,
    hp: &Hyperparams,
    rng: &mut R,
) -> Result<()> {
    let n_edges = comp.assignments.len();
    let base = Normal::new(0.0, hp.sigma_eta_sq.sqrt()).expect("positive variance");

    // (a) slices
    let mut weights = comp.weights();
    let mut min_slice = f64::INFINITY;
    for e in 0..n_edges {
        let u: f64 = Open01.sample(rng);
        let s = u * weights[comp.assignments[e]];
        comp.slice_vars[e] = s;
        min_slice = min_slice.min(s);
    }

    // (b) extend until the unrepresented mass is below every slice
    let mut remaining: f64 = comp.sticks.iter().map(|v| 1.0 - v).product();
    while remaining >= min_slice {
        if comp.sticks.len() >= MAX_COMPONENTS {
            return Err(Error::Divergence(format!(
                "stick-breaking extension exceeded {MAX_COMPONENTS} components"
            )));
        }
        let v = draw_stick(1.0, concentration, rng)?;
        weights.push(v * remaining);
        remaining *= 1.0 - v;
        comp.sticks.push(v);
        comp.atoms.push(base.sample(rng));
    }

    // (c) reassign among components whose weight exceeds the slice
    let mut logp = Vec::with_capacity(comp.atoms.len());
    let mut cand = Vec::with_capacity(comp.atoms.len());
    for e in 0..n_edges {
        logp.clear();
        cand.clear();
        let s = comp.slice_vars[e];
        let (pr, li) = (evidence.prec[e], evidence.lin[e]);
        let mut max = f64::NEG_INFINITY;
        for (h, &w) in weights.iter().enumerate() {
            if w > s {
                let a = comp.atoms[h];
                let lp = -0.5 * pr * a * a + li * a;
                max = max.max(lp);
                logp.push(lp);
                cand.push(h);
            }
        }
        debug_assert!(!cand.is_empty(), "current assignment always qualifies");
        let total: f64 = logp.iter().map(|lp| (lp - max).exp()).sum();
        let mut target = rng.random::<f64>() * total;
        let mut chosen = *cand.last().unwrap();
        for (i, lp) in logp.iter().enumerate() {
            target -= (lp - max).exp();
            if target < 0.0 {
                chosen = cand[i];
                break;
            }
        }
        comp.assignments[e] = chosen;
    }

    // (d) drop trailing empty components, then sticks given counts
    let used = comp.assignments.iter().copied().max().unwrap_or(0) + 1;
    comp.atoms.truncate(used);
    comp.sticks.truncate(used);
    let mut counts = vec![0usize; used];
    let mut prec = vec![1.0 / hp.sigma_eta_sq; used];
    let mut lin = vec![0.0; used];
    for e in 0..n_edges {
        let h = comp.assignments[e];
        counts[h] += 1;
        prec[h] += evidence.prec[e];
        lin[h] += evidence.lin[e];
    }
    for (h, (a, b)) in stick_conditionals(&counts, concentration).into_iter().enumerate() {
        comp.sticks[h] = draw_stick(a, b, rng)?;
    }

    // (e) atoms from their conjugate posteriors (prior when empty)
    for h in 0..used {
        comp.atoms[h] = if counts[h] == 0 {
            base.sample(rng)
        } else {
            let mean = lin[h] / prec[h];
            Normal::new(mean, (1.0 / prec[h]).sqrt())
                .map_err(|e| Error::Divergence(format!("atom posterior: {e}")))?
                .sample(rng)
        };
    }
    Ok(())
}

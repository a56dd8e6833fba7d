//! Edge indicators and the latent spike/slab scales.

use rand::Rng;
use rand_distr::{Distribution, Exp, Gamma, InverseGaussian};

use super::precision::EdgePriors;
use crate::error::Result;
use crate::model::{
    log_slab_density, log_spike_density, EdgeIndex, Hyperparams, IndicatorScheme, PrecisionState,
};

/// `P(delta = 1 | omega)` comparing `w N(omega; 0, 1/tau)` against the
/// collapsed spike `(1 - w) DE(omega; lambda0)`, in log space.
pub fn indicator_probability(w: f64, omega: f64, tau: f64, lambda0: f64) -> Result<f64> {
    let l1 = w.ln() + log_slab_density(omega, tau)?;
    let l0 = (1.0 - w).ln() + log_spike_density(omega, lambda0)?;
    Ok(probability_from_logs(l1, l0))
}

fn probability_from_logs(l1: f64, l0: f64) -> f64 {
    if l1 == f64::NEG_INFINITY {
        return 0.0;
    }
    if l0 == f64::NEG_INFINITY {
        return 1.0;
    }
    let d = l0 - l1;
    if d > 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    }
}

/// Shape and rate of the slab precision conditional.
pub fn slab_conditional(omega: f64, a_tau: f64, b_tau: f64) -> (f64, f64) {
    (a_tau + 0.5, b_tau + 0.5 * omega * omega)
}

/// Draws the spike variance given `omega`: its reciprocal is inverse Gaussian
/// with mean `lambda0 / |omega|` and shape `lambda0^2`. At `omega = 0` the
/// conditional degenerates and the `Exp(lambda0^2 / 2)` prior is used.
pub fn draw_spike_variance<R: Rng + ?Sized>(omega: f64, lambda0: f64, rng: &mut R) -> f64 {
    let prior = Exp::new(0.5 * lambda0 * lambda0).expect("positive rate");
    if omega == 0.0 {
        return positive_or_resample(|r| prior.sample(r), rng);
    }
    let mean = lambda0 / omega.abs();
    match InverseGaussian::new(mean, lambda0 * lambda0) {
        Ok(ig) => positive_or_resample(|r| 1.0 / ig.sample(r), rng),
        Err(_) => positive_or_resample(|r| prior.sample(r), rng),
    }
}

fn positive_or_resample<R: Rng + ?Sized>(mut f: impl FnMut(&mut R) -> f64, rng: &mut R) -> f64 {
    loop {
        let x = f(rng);
        if x > 0.0 && x.is_finite() {
            return x;
        }
    }
}

fn draw_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    let g = Gamma::new(shape, 1.0 / rate).expect("positive gamma parameters");
    positive_or_resample(|r| g.sample(r), rng)
}

/// Redraws edge indicators (under [`IndicatorScheme::Conditional`]) and then
/// the latent scales. A latent that is not attached to the current indicator
/// is drawn from its prior.
pub fn update_indicators<R: Rng + ?Sized>(
    state: &mut PrecisionState,
    priors: &EdgePriors,
    hp: &Hyperparams,
    edges: &EdgeIndex,
    rng: &mut R,
) -> Result<()> {
    for (e, &(k, l)) in edges.pairs().iter().enumerate() {
        let omega = state.omega[(k, l)];
        if hp.indicator_scheme == IndicatorScheme::Conditional {
            let l1 = priors.ln_on[e] + log_slab_density(omega, state.tau_slab[e])?;
            let l0 = priors.ln_off[e] + log_spike_density(omega, hp.lambda0)?;
            state.delta[e] = rng.random::<f64>() < probability_from_logs(l1, l0);
        }
        if state.delta[e] {
            let (shape, rate) = slab_conditional(omega, hp.a_tau, hp.b_tau);
            state.tau_slab[e] = draw_gamma(shape, rate, rng);
            state.tau_spike_var[e] = draw_spike_variance(0.0, hp.lambda0, rng);
        } else {
            state.tau_slab[e] = draw_gamma(hp.a_tau, hp.b_tau, rng);
            state.tau_spike_var[e] = draw_spike_variance(omega, hp.lambda0, rng);
        }
    }
    Ok(())
}

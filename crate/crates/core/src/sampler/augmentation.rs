//! Latent Gaussian augmentation of the edge indicators.
//!
//! With `mu = eta0 + etag`, the indicator is `delta = 1(u > 0)` where
//! `u ~ N(mu, s^2 sigma_phi^2)`, `s^2 = pi^2 (phi - 2) / (3 phi)` and
//! `sigma_phi^2 ~ InvGamma(phi/2, phi/2)`; marginally `u` is a scaled
//! Student-t whose CDF tracks the logistic. The probit link fixes the latent
//! variance at one.

use rand::Rng;
use rand_distr::{Distribution, Gamma};

use super::precision::EdgePriors;
use super::truncnorm;
use crate::model::{std_normal_ln_cdf, t_link_scale, Hyperparams, Link};

/// Variance of `u` around `mu` for the given mixture scale.
#[inline]
pub fn latent_variance(link: Link, phi: f64, sigma_phi_sq: f64) -> f64 {
    match link {
        Link::Logistic => t_link_scale(phi) * sigma_phi_sq,
        Link::Probit => 1.0,
    }
}

/// Shape and scale of the inverse-gamma conditional of `sigma_phi^2`.
pub fn mixing_conditional(phi: f64, residual: f64) -> (f64, f64) {
    (
        0.5 * (phi + 1.0),
        0.5 * (phi + residual * residual / t_link_scale(phi)),
    )
}

/// Redraws `u` given the indicators and then the mixing scales, for one
/// condition.
pub fn update_augmentation<R: Rng + ?Sized>(
    delta: &[bool],
    predictor: &[f64],
    u: &mut [f64],
    sigma_phi_sq: &mut [f64],
    hp: &Hyperparams,
    rng: &mut R,
) {
    for e in 0..delta.len() {
        let mu = predictor[e];
        let sd = latent_variance(hp.link, hp.phi, sigma_phi_sq[e]).sqrt();
        u[e] = truncnorm::sample_signed(mu, sd, delta[e], rng);
        if hp.link == Link::Logistic {
            let (shape, scale) = mixing_conditional(hp.phi, u[e] - mu);
            let g = Gamma::new(shape, 1.0 / scale).expect("positive parameters");
            sigma_phi_sq[e] = 1.0 / g.sample(rng);
        }
    }
}

/// Indicator prior given the predictor and the current mixing scale, with
/// `u` integrated out: `P(u > 0) = Phi(mu / sd)`.
pub fn edge_priors(predictor: &[f64], sigma_phi_sq: &[f64], hp: &Hyperparams) -> EdgePriors {
    let mut ln_on = Vec::with_capacity(predictor.len());
    let mut ln_off = Vec::with_capacity(predictor.len());
    for (mu, s2) in predictor.iter().zip(sigma_phi_sq) {
        let x = mu / latent_variance(hp.link, hp.phi, *s2).sqrt();
        ln_on.push(std_normal_ln_cdf(x));
        ln_off.push(std_normal_ln_cdf(-x));
    }
    EdgePriors { ln_on, ln_off }
}

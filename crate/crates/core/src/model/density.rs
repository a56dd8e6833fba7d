use num_traits::{Float, FloatConst, FromPrimitive};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

fn positive<T: Float>(value: T, name: &str) -> Result<()> {
    if value > T::zero() && value.is_finite() {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be positive and finite")))
    }
}

/// Log density of the double-exponential spike `DE(omega; lambda0)` with scale
/// `1 / lambda0`.
pub fn log_spike_density<T: Float + FromPrimitive>(omega: T, lambda0: T) -> Result<T> {
    positive(lambda0, "lambda0")?;
    let two = T::from_f64(2.0).unwrap();
    Ok((lambda0 / two).ln() - lambda0 * omega.abs())
}

/// Log density of the Gaussian slab `N(omega; 0, 1/tau)`.
pub fn log_slab_density<T: Float + FloatConst + FromPrimitive>(omega: T, tau: T) -> Result<T> {
    positive(tau, "tau")?;
    let half = T::from_f64(0.5).unwrap();
    Ok(half * (tau / (T::PI() + T::PI())).ln() - half * tau * omega * omega)
}

/// Log density of the slab with its Gamma(a, b) precision integrated out: a
/// Student-t with `2a` degrees of freedom and squared scale `b / a`.
pub fn log_slab_marginal(omega: f64, a_tau: f64, b_tau: f64) -> Result<f64> {
    positive(a_tau, "a_tau")?;
    positive(b_tau, "b_tau")?;
    Ok(ln_gamma(a_tau + 0.5)
        - ln_gamma(a_tau)
        - 0.5 * (2.0 * std::f64::consts::PI * b_tau).ln()
        - (a_tau + 0.5) * (1.0 + omega * omega / (2.0 * b_tau)).ln())
}

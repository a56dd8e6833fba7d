use rand::Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{Error, Result};

/// Gamma (shape, rate) conditional of the concentration given `Beta(1, M)`
/// sticks.
pub fn concentration_conditional<'a>(
    a_m: f64,
    b_m: f64,
    sticks: impl IntoIterator<Item = &'a f64>,
) -> (f64, f64) {
    let mut count = 0usize;
    let mut log_sum = 0.0;
    for &v in sticks {
        count += 1;
        log_sum += (1.0 - v).ln();
    }
    (a_m + count as f64, b_m - log_sum)
}

pub fn update_concentration<'a, R: Rng + ?Sized>(
    a_m: f64,
    b_m: f64,
    sticks: impl IntoIterator<Item = &'a f64>,
    rng: &mut R,
) -> Result<f64> {
    let (shape, rate) = concentration_conditional(a_m, b_m, sticks);
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::Divergence(format!("concentration rate {rate} not positive")));
    }
    let g = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::Divergence(e.to_string()))?;
    loop {
        let m = g.sample(rng);
        if m > 0.0 {
            return Ok(m);
        }
    }
}

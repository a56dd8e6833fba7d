//! One-sided truncated normal draws.

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

/// Standard normal conditioned on `z > a`.
///
/// Plain rejection when `a <= 0` (acceptance at least one half); otherwise
/// Robert's translated-exponential proposal with rate `(a + sqrt(a^2 + 4)) / 2`,
/// which stays efficient arbitrarily far into the tail.
pub fn std_normal_above<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    if a <= 0.0 {
        loop {
            let z: f64 = StandardNormal.sample(rng);
            if z > a {
                return z;
            }
        }
    }
    let rate = 0.5 * (a + (a * a + 4.0).sqrt());
    loop {
        let e: f64 = Exp1.sample(rng);
        if e <= 0.0 {
            continue;
        }
        let z = a + e / rate;
        let d = z - rate;
        let accept: f64 = rng.random();
        if accept <= (-0.5 * d * d).exp() && z > a {
            return z;
        }
    }
}

/// `N(mean, sd^2)` restricted to `(0, inf)` when `positive`, else `(-inf, 0]`.
pub fn sample_signed<R: Rng + ?Sized>(mean: f64, sd: f64, positive: bool, rng: &mut R) -> f64 {
    let a = -mean / sd;
    if positive {
        let x = mean + sd * std_normal_above(a, rng);
        // guard against the rounded value landing exactly on the boundary
        if x > 0.0 {
            x
        } else {
            f64::MIN_POSITIVE
        }
    } else {
        let x = mean - sd * std_normal_above(-a, rng);
        x.min(0.0)
    }
}

use num_traits::Float;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

/// Edge-probability link `h(eta0, etag)`: logistic in the sum of the shared
/// and condition-specific effects.
///
/// Evaluated on whichever branch keeps `exp` from overflowing.
pub fn logistic_link<T: Float>(eta0: T, etag: T) -> T {
    let s = eta0 + etag;
    let one = T::one();
    if s < T::zero() {
        let e = s.exp();
        e / (one + e)
    } else {
        one / (one + (-s).exp())
    }
}

pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `ln Phi(x)`, accurate far into the lower tail.
pub fn std_normal_ln_cdf(x: f64) -> f64 {
    if x > -30.0 {
        std_normal_cdf(x).ln()
    } else {
        // Mills-ratio asymptotics
        let x2 = x * x;
        -0.5 * x2 - (-x).ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
            + (1.0 - 1.0 / x2 + 3.0 / (x2 * x2)).ln()
    }
}

/// Variance of the Student-t that approximates the logistic CDF with `phi`
/// degrees of freedom: `pi^2 (phi - 2) / (3 phi)`.
pub fn t_link_scale(phi: f64) -> f64 {
    std::f64::consts::PI.powi(2) * (phi - 2.0) / (3.0 * phi)
}

/// Which link the edge-probability latent augmentation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    /// Logistic link via the scale-mixture Student-t approximation.
    #[default]
    Logistic,
    /// Exact probit link (unit-variance Gaussian latent).
    Probit,
}

impl Link {
    /// Marginal edge probability given the log-odds-scale predictor.
    pub fn probability(self, mu: f64) -> f64 {
        match self {
            Link::Logistic => logistic_link(mu, 0.0),
            Link::Probit => std_normal_cdf(mu),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Link::Logistic => "logistic",
            Link::Probit => "probit",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn logistic_at_zero_is_half() {
        assert_eq!(logistic_link(0.0_f64, 0.0), 0.5);
        assert_eq!(logistic_link(0.0_f32, 0.0), 0.5);
    }

    #[test]
    fn logistic_known_value() {
        // e^2 / (1 + e^2)
        let e2 = 2.0_f64.exp();
        let oracle = e2 / (1.0 + e2);
        assert_relative_eq!(logistic_link(1.0, 1.0), oracle, epsilon = 1e-15);
        assert_relative_eq!(logistic_link(1.0, 1.0), 0.88079708, epsilon = 1e-8);
    }

    #[test]
    fn logistic_saturates_without_nan() {
        assert_eq!(logistic_link(800.0_f64, 0.0), 1.0);
        assert_eq!(logistic_link(-800.0_f64, 0.0), 0.0);
    }

    #[test]
    fn t_scale_matches_hand_value() {
        // pi^2 * 5.3 / 21.9
        assert_relative_eq!(t_link_scale(7.3), 2.388_5, epsilon = 1e-4);
    }

    #[test]
    fn ln_cdf_continuous_across_branch() {
        let a = std_normal_ln_cdf(-29.999_999);
        let b = std_normal_ln_cdf(-30.000_001);
        assert!((a - b).abs() < 1e-3);
        assert_relative_eq!(std_normal_ln_cdf(0.0), 0.5_f64.ln(), epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn logistic_shift_invariant(a in -30.0f64..30.0, b in -30.0f64..30.0, c in -30.0f64..30.0) {
            let lhs = logistic_link(a + c, b - c);
            let rhs = logistic_link(a, b);
            prop_assert!((lhs - rhs).abs() <= 1e-14);
        }

        #[test]
        fn logistic_monotone(a in -40.0f64..40.0, d in 0.0f64..5.0, b in -5.0f64..5.0) {
            prop_assert!(logistic_link(a + d, b) >= logistic_link(a, b));
        }
    }
}

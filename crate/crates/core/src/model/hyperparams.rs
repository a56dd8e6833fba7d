use serde::{Deserialize, Serialize};

use super::link::Link;
use crate::error::{Error, Result};

/// How edge indicators are refreshed inside a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorScheme {
    /// Inside each column update, draw `delta_kj` with `omega_kj` integrated
    /// out of its Gaussian full conditional, then redraw `omega_kj`.
    #[default]
    ColumnMarginal,
    /// Draw `delta_kl` given the current `omega_kl`, comparing the slab density
    /// with the collapsed double-exponential spike.
    Conditional,
}

/// Whether the `G + 1` Dirichlet-process components share one concentration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConcentrationMode {
    #[default]
    Shared,
    PerComponent,
}

/// Fixed constants of the model plus chain controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Hyperparams {
    /// Rate of the double-exponential spike.
    pub lambda0: f64,
    /// Diagonal entries carry an exponential prior with rate `alpha / 2`.
    pub alpha: f64,
    pub a_tau: f64,
    pub b_tau: f64,
    pub a_m: f64,
    pub b_m: f64,
    /// Variance of the Gaussian base measure of every DP component.
    pub sigma_eta_sq: f64,
    /// Degrees of freedom of the t approximation to the logistic link.
    pub phi: f64,
    /// Edges with `|posterior mean omega| > edge_threshold` are selected.
    pub edge_threshold: f64,
    pub n_burnin: usize,
    pub n_iter: usize,
    pub thin: usize,
    pub seed: u64,
    pub link: Link,
    pub indicator_scheme: IndicatorScheme,
    pub concentration: ConcentrationMode,
    /// Level of the equal-tailed credible intervals on partial correlations.
    pub ci_level: f64,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            lambda0: 100.0,
            alpha: 1.0,
            a_tau: 0.1,
            b_tau: 1.0,
            a_m: 1.0,
            b_m: 1.0,
            sigma_eta_sq: 1.0,
            phi: 7.3,
            edge_threshold: 0.1,
            n_burnin: 1000,
            n_iter: 5000,
            thin: 1,
            seed: 0,
            link: Link::Logistic,
            indicator_scheme: IndicatorScheme::ColumnMarginal,
            concentration: ConcentrationMode::Shared,
            ci_level: 0.95,
        }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("lambda0", self.lambda0),
            ("alpha", self.alpha),
            ("a_tau", self.a_tau),
            ("b_tau", self.b_tau),
            ("a_m", self.a_m),
            ("b_m", self.b_m),
            ("sigma_eta_sq", self.sigma_eta_sq),
            ("phi", self.phi),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.phi <= 2.0 {
            return Err(Error::Config(format!("phi must exceed 2, got {}", self.phi)));
        }
        if !(self.edge_threshold >= 0.0 && self.edge_threshold.is_finite()) {
            return Err(Error::Config("edge_threshold must be nonnegative".into()));
        }
        if self.n_iter == 0 || self.thin == 0 {
            return Err(Error::Config("n_iter and thin must be positive".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::Config("ci_level must lie in (0, 1)".into()));
        }
        Ok(())
    }

    /// Parses and validates a TOML table; absent keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let hp: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        hp.validate()?;
        Ok(hp)
    }

    /// Reads JSON for `.json` files and TOML otherwise.
    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            let hp: Self = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
            hp.validate()?;
            Ok(hp)
        } else {
            Self::from_toml_str(&text)
        }
    }

    /// Number of draws a chain with these controls stores.
    pub fn n_stored(&self) -> usize {
        self.n_iter / self.thin
    }
}

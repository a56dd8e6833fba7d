use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::partial_corr_series;
use crate::error::{Error, Result};
use crate::sampler::TraceArchive;

/// Asymptotic 5% critical value of the constant-only Dickey-Fuller test.
pub const DF_CRITICAL_5PCT: f64 = -2.86;

/// Shortest trace accepted by the stationarity test.
pub const DF_MIN_LENGTH: usize = 25;

/// Number of edge partial-correlation traces checked per condition.
pub const DIAGNOSE_EDGES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DfOutcome {
    Tested { statistic: f64, stationary: bool },
    /// The trace never moves.
    StationaryByConstancy,
}

impl DfOutcome {
    pub fn stationary(&self) -> bool {
        match self {
            DfOutcome::Tested { stationary, .. } => *stationary,
            DfOutcome::StationaryByConstancy => true,
        }
    }
}

/// Regresses `x_t - x_{t-1}` on an intercept and `x_{t-1}`; the statistic
/// is the slope over its standard error.
pub fn dickey_fuller(trace: &[f64]) -> Result<DfOutcome> {
    if trace.len() < DF_MIN_LENGTH {
        return Err(Error::Usage(format!(
            "stationarity test needs at least {DF_MIN_LENGTH} values, got {}",
            trace.len()
        )));
    }
    if trace.iter().any(|x| !x.is_finite()) {
        return Err(Error::Usage("trace contains non-finite values".into()));
    }
    let lag = &trace[..trace.len() - 1];
    let m = lag.len() as f64;
    let dy: Vec<f64> = trace.windows(2).map(|w| w[1] - w[0]).collect();
    let mx = lag.iter().sum::<f64>() / m;
    let my = dy.iter().sum::<f64>() / m;
    let sxx: f64 = lag.iter().map(|x| (x - mx) * (x - mx)).sum();
    let scale = mx.abs().max(1.0);
    if sxx <= (1e-14 * scale).powi(2) * m {
        return Ok(DfOutcome::StationaryByConstancy);
    }
    let sxy: f64 = lag.iter().zip(&dy).map(|(x, y)| (x - mx) * (y - my)).sum();
    let beta = sxy / sxx;
    let ssr: f64 = lag
        .iter()
        .zip(&dy)
        .map(|(x, y)| {
            let r = y - my - beta * (x - mx);
            r * r
        })
        .sum();
    let se = (ssr / (m - 2.0) / sxx).sqrt();
    let statistic = if se > 0.0 {
        beta / se
    } else if beta < 0.0 {
        f64::NEG_INFINITY
    } else if beta > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    Ok(DfOutcome::Tested {
        statistic,
        stationary: statistic < DF_CRITICAL_5PCT,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceDiagnostic {
    pub name: String,
    pub outcome: DfOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub traces: Vec<TraceDiagnostic>,
    pub n_stationary: usize,
    pub n_total: usize,
}

impl DiagnosticsReport {
    pub fn fraction_stationary(&self) -> f64 {
        self.n_stationary as f64 / self.n_total.max(1) as f64
    }
}

fn log_det_series(archive: &TraceArchive, g: usize) -> Vec<f64> {
    (0..archive.len())
        .map(|s| {
            let om = archive.omega_draw(g, s);
            match om.cholesky() {
                Some(c) => 2.0 * c.l().diagonal().iter().map(|d| d.ln()).sum::<f64>(),
                None => f64::NAN,
            }
        })
        .collect()
}

/// Stationarity tests on each condition's log-determinant, a fixed random
/// subset of edge partial correlations (chosen by `seed`), and the DP
/// concentration.
pub fn diagnose(archive: &TraceArchive, seed: u64) -> Result<DiagnosticsReport> {
    if archive.len() < DF_MIN_LENGTH {
        return Err(Error::Usage(format!(
            "archive has {} draws; diagnostics need at least {DF_MIN_LENGTH}",
            archive.len()
        )));
    }
    let edges = archive.edges();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = sample(&mut rng, edges.len(), DIAGNOSE_EDGES.min(edges.len())).into_vec();
    chosen.sort_unstable();

    let mut traces = Vec::new();
    for g in 0..archive.n_conditions() {
        let label = &archive.labels()[g];
        traces.push(TraceDiagnostic {
            name: format!("logdet[{label}]"),
            outcome: dickey_fuller(&log_det_series(archive, g))?,
        });
        for &e in &chosen {
            let (k, l) = edges.pair(e);
            traces.push(TraceDiagnostic {
                name: format!("rho[{label}][{k},{l}]"),
                outcome: dickey_fuller(&partial_corr_series(archive, g, k, l))?,
            });
        }
    }
    for slot in 0..archive.concentration_slots() {
        traces.push(TraceDiagnostic {
            name: format!("concentration[{slot}]"),
            outcome: dickey_fuller(archive.concentration_series(slot))?,
        });
    }
    let n_stationary = traces.iter().filter(|t| t.outcome.stationary()).count();
    let n_total = traces.len();
    Ok(DiagnosticsReport { traces, n_stationary, n_total })
}

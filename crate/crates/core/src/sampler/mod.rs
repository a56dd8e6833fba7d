//! Block Gibbs sampler over precisions, indicators, latent augmentation,
//! Dirichlet-process components, and the concentration.

pub mod archive;
pub mod augmentation;
pub mod concentration;
pub mod dp;
pub mod indicators;
pub mod precision;
pub mod rng;
pub mod truncnorm;

use std::collections::HashSet;

use nalgebra::DMatrix;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;

pub use archive::TraceArchive;
pub use dp::AtomEvidence;
pub use precision::EdgePriors;
pub use rng::ChainRng;

use crate::error::{Error, Result};
use crate::model::{
    AugmentationState, ConcentrationMode, ConditionData, DpComponentState, EdgeIndex, Hyperparams,
    Link, PrecisionState,
};
use rng::{substream, Domain, SHARED_KEY};

/// Complete state of one chain. `components[0]` is the shared effect and
/// `components[g + 1]` the differential effect of condition `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub precision: Vec<PrecisionState>,
    pub components: Vec<DpComponentState>,
    pub augmentation: AugmentationState,
    /// One shared value, or one per component.
    pub concentration: Vec<f64>,
    pub iteration: usize,
}

impl ChainState {
    pub fn n_conditions(&self) -> usize {
        self.precision.len()
    }

    /// Predictor `eta0 + etag` for every edge of condition `g`.
    pub fn predictor(&self, g: usize) -> Vec<f64> {
        let shared = &self.components[0];
        let own = &self.components[g + 1];
        (0..shared.assignments.len())
            .map(|e| shared.value(e) + own.value(e))
            .collect()
    }

    pub fn concentration_for(&self, component: usize) -> f64 {
        if self.concentration.len() == 1 {
            self.concentration[0]
        } else {
            self.concentration[component]
        }
    }

    /// Checks every state invariant, including sign consistency of the
    /// augmentation latents with the indicators.
    pub fn check(&self) -> Result<()> {
        for ps in &self.precision {
            ps.check()?;
        }
        for c in &self.components {
            c.check()?;
        }
        for (g, ps) in self.precision.iter().enumerate() {
            for (e, &d) in ps.delta.iter().enumerate() {
                if (self.augmentation.u[g][e] > 0.0) != d {
                    return Err(Error::MatrixDomain(format!(
                        "latent sign disagrees with indicator (condition {g}, edge {e})"
                    )));
                }
                if !(self.augmentation.sigma_phi_sq[g][e] > 0.0) {
                    return Err(Error::MatrixDomain("mixing scale not positive".into()));
                }
            }
        }
        if self.concentration.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::MatrixDomain("concentration not positive".into()));
        }
        Ok(())
    }
}

/// Edge probabilities `h(eta0, etag)` implied by the current atoms, one
/// edge-indexed vector per condition.
pub fn compute_weights(state: &ChainState, link: Link) -> Vec<Vec<f64>> {
    (0..state.n_conditions())
        .map(|g| {
            state
                .predictor(g)
                .into_iter()
                .map(|mu| link.probability(mu))
                .collect()
        })
        .collect()
}

struct Streams {
    precision: Vec<ChainRng>,
    augmentation: Vec<ChainRng>,
    components: Vec<ChainRng>,
    concentration: ChainRng,
}

/// A running chain bound to its data.
pub struct Chain<'a> {
    data: &'a [ConditionData<f64>],
    hp: Hyperparams,
    edges: EdgeIndex,
    state: ChainState,
    streams: Streams,
    /// Conditions sorted by stream key; every cross-condition reduction runs
    /// in this order.
    order: Vec<usize>,
    pd_checks: usize,
}

fn validate_inputs(data: &[ConditionData<f64>], hp: &Hyperparams) -> Result<usize> {
    hp.validate()?;
    let first = data
        .first()
        .ok_or_else(|| Error::Config("at least one condition is required".into()))?;
    let p = first.p();
    if p < 2 {
        return Err(Error::Config(format!("need at least 2 nodes, got {p}")));
    }
    let mut seen = HashSet::new();
    for d in data {
        if d.p() != p {
            return Err(Error::Config(format!(
                "condition '{}' has {} nodes, expected {p}",
                d.label,
                d.p()
            )));
        }
        if !seen.insert(d.label.as_str()) {
            return Err(Error::Config(format!("duplicate condition label '{}'", d.label)));
        }
        d.validate()?;
    }
    Ok(p)
}

/// Builds the initial state: identity precisions, all indicators off, prior
/// means for the latent scales, one atom per DP component.
pub fn init_chain(data: &[ConditionData<f64>], hp: &Hyperparams) -> Result<ChainState> {
    Ok(Chain::new(data, hp)?.state)
}

impl<'a> Chain<'a> {
    pub fn new(data: &'a [ConditionData<f64>], hp: &Hyperparams) -> Result<Self> {
        let p = validate_inputs(data, hp)?;
        let seed = hp.seed;
        let g_count = data.len();
        let edges = EdgeIndex::new(p);
        let n_edges = edges.len();

        let mut streams = Streams {
            precision: data
                .iter()
                .map(|d| substream(seed, Domain::Precision, &d.label))
                .collect(),
            augmentation: data
                .iter()
                .map(|d| substream(seed, Domain::Augmentation, &d.label))
                .collect(),
            components: std::iter::once(SHARED_KEY)
                .chain(data.iter().map(|d| d.label.as_str()))
                .map(|key| substream(seed, Domain::Component, key))
                .collect(),
            concentration: substream(seed, Domain::Concentration, SHARED_KEY),
        };

        let m_prior = Gamma::new(hp.a_m, 1.0 / hp.b_m).expect("validated");
        let concentration: Vec<f64> = match hp.concentration {
            ConcentrationMode::Shared => vec![m_prior.sample(&mut streams.concentration)],
            ConcentrationMode::PerComponent => streams
                .components
                .iter_mut()
                .map(|r| m_prior.sample(r))
                .collect(),
        };
        let mut components = Vec::with_capacity(g_count + 1);
        for (c, r) in streams.components.iter_mut().enumerate() {
            let m = concentration[if concentration.len() == 1 { 0 } else { c }];
            components.push(dp::init_component(n_edges, m, hp, r)?);
        }

        let precision = (0..g_count)
            .map(|_| PrecisionState {
                omega: DMatrix::identity(p, p),
                sigma: DMatrix::identity(p, p),
                delta: vec![false; n_edges],
                tau_slab: vec![hp.a_tau / hp.b_tau; n_edges],
                tau_spike_var: vec![2.0 / (hp.lambda0 * hp.lambda0); n_edges],
            })
            .collect();

        let mut state = ChainState {
            precision,
            components,
            augmentation: AugmentationState {
                u: vec![vec![0.0; n_edges]; g_count],
                sigma_phi_sq: vec![vec![1.0; n_edges]; g_count],
            },
            concentration,
            iteration: 0,
        };
        for g in 0..g_count {
            let pred = state.predictor(g);
            let mut init_rng = substream(seed, Domain::Init, &data[g].label);
            let aug = &mut state.augmentation;
            augmentation::update_augmentation(
                &state.precision[g].delta,
                &pred,
                &mut aug.u[g],
                &mut aug.sigma_phi_sq[g],
                hp,
                &mut init_rng,
            );
        }

        let mut order: Vec<usize> = (0..g_count).collect();
        order.sort_by_key(|&g| (rng::fnv1a(data[g].label.as_bytes()), data[g].label.clone()));

        Ok(Self {
            data,
            hp: hp.clone(),
            edges,
            state,
            streams,
            order,
            pd_checks: 0,
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hp
    }

    pub fn edges(&self) -> &EdgeIndex {
        &self.edges
    }

    /// Number of post-sweep positive-definiteness checks passed so far.
    pub fn pd_checks(&self) -> usize {
        self.pd_checks
    }

    /// One full sweep in the fixed order: precision and indicators per
    /// condition, augmentation, DP components, concentration.
    pub fn sweep(&mut self) -> Result<()> {
        let iteration = self.state.iteration;
        self.sweep_inner().map_err(|e| e.with_iteration(iteration))?;
        self.state.iteration += 1;
        Ok(())
    }

    fn sweep_inner(&mut self) -> Result<()> {
        let hp = &self.hp;
        let edges = &self.edges;
        let g_count = self.data.len();
        let predictors: Vec<Vec<f64>> = (0..g_count).map(|g| self.state.predictor(g)).collect();

        let priors: Vec<EdgePriors> = (0..g_count)
            .map(|g| {
                augmentation::edge_priors(
                    &predictors[g],
                    &self.state.augmentation.sigma_phi_sq[g],
                    hp,
                )
            })
            .collect();

        self.state
            .precision
            .par_iter_mut()
            .zip(self.streams.precision.par_iter_mut())
            .zip(self.data.par_iter())
            .zip(priors.par_iter())
            .enumerate()
            .try_for_each(|(g, (((ps, r), d), pri))| -> Result<()> {
                precision::update_precision(g, ps, d, pri, hp, edges, r)?;
                indicators::update_indicators(ps, pri, hp, edges, r)
            })?;
        self.pd_checks += g_count;

        let aug = &mut self.state.augmentation;
        let precision_states = &self.state.precision;
        aug.u
            .par_iter_mut()
            .zip(aug.sigma_phi_sq.par_iter_mut())
            .zip(self.streams.augmentation.par_iter_mut())
            .enumerate()
            .for_each(|(g, ((u, s2), r))| {
                augmentation::update_augmentation(
                    &precision_states[g].delta,
                    &predictors[g],
                    u,
                    s2,
                    hp,
                    r,
                );
            });

        self.update_components()?;
        self.update_concentration()?;
        Ok(())
    }

    fn latent_variances(&self, g: usize) -> Vec<f64> {
        self.state.augmentation.sigma_phi_sq[g]
            .iter()
            .map(|&s2| augmentation::latent_variance(self.hp.link, self.hp.phi, s2))
            .collect()
    }

    fn update_components(&mut self) -> Result<()> {
        let n_edges = self.edges.len();
        let variances: Vec<Vec<f64>> = (0..self.data.len()).map(|g| self.latent_variances(g)).collect();

        // shared component: residuals u_g - eta_g from every condition
        let mut ev = AtomEvidence::zeros(n_edges);
        for &g in &self.order {
            let own = &self.state.components[g + 1];
            let resid: Vec<f64> = (0..n_edges)
                .map(|e| self.state.augmentation.u[g][e] - own.value(e))
                .collect();
            ev.add(&resid, &variances[g]);
        }
        let m0 = self.state.concentration_for(0);
        dp::update_dp_component(
            &mut self.state.components[0],
            &ev,
            m0,
            &self.hp,
            &mut self.streams.components[0],
        )?;

        // differential components: residuals u_g - eta0
        for g in 0..self.data.len() {
            let shared = &self.state.components[0];
            let resid: Vec<f64> = (0..n_edges)
                .map(|e| self.state.augmentation.u[g][e] - shared.value(e))
                .collect();
            let mut ev = AtomEvidence::zeros(n_edges);
            ev.add(&resid, &variances[g]);
            let m = self.state.concentration_for(g + 1);
            dp::update_dp_component(
                &mut self.state.components[g + 1],
                &ev,
                m,
                &self.hp,
                &mut self.streams.components[g + 1],
            )?;
        }
        Ok(())
    }

    fn update_concentration(&mut self) -> Result<()> {
        let hp = &self.hp;
        match hp.concentration {
            ConcentrationMode::Shared => {
                let comps = &self.state.components;
                let sticks = std::iter::once(0)
                    .chain(self.order.iter().map(|&g| g + 1))
                    .flat_map(|c| comps[c].sticks.iter());
                self.state.concentration[0] = concentration::update_concentration(
                    hp.a_m,
                    hp.b_m,
                    sticks,
                    &mut self.streams.concentration,
                )?;
            }
            ConcentrationMode::PerComponent => {
                for c in 0..self.state.components.len() {
                    self.state.concentration[c] = concentration::update_concentration(
                        hp.a_m,
                        hp.b_m,
                        &self.state.components[c].sticks,
                        &mut self.streams.components[c],
                    )?;
                }
            }
        }
        Ok(())
    }

    /// Appends the current state to `archive`.
    pub fn record(&self, archive: &mut TraceArchive) {
        let weights = compute_weights(&self.state, self.hp.link);
        let omegas: Vec<&DMatrix<f64>> = self.state.precision.iter().map(|p| &p.omega).collect();
        let deltas: Vec<&[bool]> = self.state.precision.iter().map(|p| p.delta.as_slice()).collect();
        archive.push(
            self.state.iteration,
            &omegas,
            &deltas,
            &weights,
            &self.state.concentration,
        );
    }

    pub fn empty_archive(&self) -> TraceArchive {
        TraceArchive::new(
            self.edges.p(),
            self.data.iter().map(|d| d.label.clone()).collect(),
            self.state.concentration.len(),
            self.hp.link,
        )
    }
}

/// Runs `n_burnin + n_iter` sweeps and stores every `thin`-th post-burn-in
/// state. Any failure discards the partial trace.
pub fn run_chain(data: &[ConditionData<f64>], hp: &Hyperparams) -> Result<TraceArchive> {
    let mut chain = Chain::new(data, hp)?;
    let mut archive = chain.empty_archive();
    for it in 0..hp.n_burnin + hp.n_iter {
        chain.sweep()?;
        if it >= hp.n_burnin && (it - hp.n_burnin + 1) % hp.thin == 0 {
            chain.record(&mut archive);
        }
    }
    Ok(archive)
}

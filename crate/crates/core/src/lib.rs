//! Joint Bayesian estimation of several sparse Gaussian graphical networks.
//!
//! Each condition's precision matrix carries a spike-and-slab graphical lasso
//! prior whose edge probabilities are tied across conditions through shared
//! and condition-specific Dirichlet-process effects on the log-odds scale.
//! The crate provides the Gibbs sampler, posterior summaries with false
//! discovery control, graph-topology posteriors, a simulation benchmark, and
//! time-series preprocessing.

pub mod error;
pub mod graphmetrics;
pub mod inference;
pub mod ingest;
pub mod model;
pub mod sampler;
pub mod scalar;
pub mod simgen;

pub use error::{Error, Result};
pub use model::{ConditionData as GenericConditionData, EdgeIndex, Hyperparams, Link};
pub use sampler::{run_chain, Chain, ChainState, TraceArchive};
pub use scalar::Real;

/// Condition data in double precision, the sampler's working type.
pub type ConditionData = model::ConditionData<f64>;
pub type ConditionDataF32 = model::ConditionData<f32>;
pub type Matrix = nalgebra::DMatrix<f64>;
pub type MatrixF32 = nalgebra::DMatrix<f32>;

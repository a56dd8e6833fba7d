//! Domain types, densities, and deterministic transforms shared by every
//! other module.

mod density;
mod hyperparams;
mod link;
mod transform;
mod types;

pub use density::{log_slab_density, log_slab_marginal, log_spike_density};
pub use hyperparams::{ConcentrationMode, Hyperparams, IndicatorScheme};
pub use link::{logistic_link, std_normal_cdf, std_normal_ln_cdf, t_link_scale, Link};
pub use transform::{fisher_z, partial_correlations};
pub use types::{
    AugmentationState, ConditionData, DpComponentState, EdgeIndex, PrecisionState,
};

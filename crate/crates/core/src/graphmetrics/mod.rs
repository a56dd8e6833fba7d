//! Binary graph topology metrics and their posterior distributions.

mod adjacency;
mod metrics;
mod posterior;

pub use adjacency::Adjacency;
pub use metrics::{
    characteristic_path_length, clustering_coefficient, global_efficiency, local_efficiency,
    shortest_paths, NodeMetric, PathLength,
};
pub use posterior::{
    metric_posteriors, write_histograms_csv, write_tests_csv, Metric, MetricPosterior, PairTest,
    TestOutcome,
};

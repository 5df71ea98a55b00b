//! Cluster sets of weight ratios and convergence of the series the
//! classifier reads.

mod clusters;
mod summability;

pub use clusters::{
    cluster_set_m_f, cluster_set_m_i, combined_clusters, inf_liminf, lambda_clusters, ClusterError, ClusterPoint,
    ClusterReport, EpsilonFamily, EpsilonRelation, LambdaClusters, LambdaPart, FINITE_CLUSTER_EPSILON,
};
pub use summability::{
    summability, summability_with_horizon, ExactTermFn, SeriesDescriptor, SeriesPart, Shape, SummabilityVerdict,
    TermFn, Verdict, N_MAX,
};

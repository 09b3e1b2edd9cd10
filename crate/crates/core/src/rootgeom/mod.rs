//! Greedy clustering of finite metric spaces and root-cluster covers
//! controlling sublevel sets of one-variable polynomials.

mod cluster;
mod sublevel;

pub use cluster::{check_cover, choose_radius, greedy_cluster, ClusterCover, FiniteMetricSpace};
pub use sublevel::{
    group_roots, sublevel_decomposition, sublevel_sweep, verify_sublevel, Root, RootClusterCover,
    SelectedRoot, SublevelConstants, SweepRecord, ROOT_MERGE_TOL,
};

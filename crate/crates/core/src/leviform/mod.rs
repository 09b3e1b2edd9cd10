//! Levi forms `J*J`, Riesz projectors, approximate minimal eigenvector
//! fields and their flows.

mod ame;
mod flow;
mod projector;
mod spectrum;

pub use ame::{ame_field, ame_ratio, AmeField, AmeRatioReport, DEFAULT_NODES, IDEMPOTENCE_TOL};
pub use flow::{
    compose_series, flow_taylor, flow_taylor_from, foliation_prepare, laplacian_comparability,
    ComparabilityReport, FoliationChart, WeierstrassSample, TRANSVERSE_GRID, TRANSVERSE_RADIUS,
};
pub use projector::{
    resolvent_projector, small_eigenvalue_count, unitary_separation, KERNEL_TOL, MIN_NODES,
};
pub use spectrum::{levi_form, min_eigenvalue, HermitianSpectrum, DET_CHECK_TOL};

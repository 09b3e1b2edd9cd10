//! Newtonian potentials, holomorphic completion of functions with bounded
//! Laplacian, and shrinking disc families built from them.

mod completion;
mod family;
mod potential;

pub use completion::{
    gradient_estimate_check, gradient_estimate_sweep, holomorphic_completion,
    holomorphic_completion_with, rim_extended_laplacian, CompletionReport, GradientEstimate,
    HolomorphicCompletion, CONJUGATE_SOLVE_TOL,
};
pub use family::{build_disc_family, default_radii, DiscFamily, DiscFamilyMember};
pub use potential::{
    five_point_laplacian, newtonian_potential, newtonian_potential_scaled, self_cell_log_mean,
    PlanarField,
};

//! Discrete weighted dbar forms on planar discs and their spectral gaps.

mod assemble;
mod experiments;
mod gap;
mod grid;
mod weight;

pub use assemble::{dbar_operator, Csr, WeightedFormAssembly};
pub use gap::{min_gap, min_gap_with, GapOptions, GapResult};
pub use grid::{DiscGrid, MIN_ACTIVE};
pub use weight::{Dilated, Flat, GaugeShifted, HermitianPoly, RadialPower, Weight};
pub use experiments::{
    annulus_norm_check, annulus_sweep, dbar_up_gap, dbar_up_sweep, fit_slope, gap_1d_general,
    gauge_gap_pair, gauge_rayleigh_pair, radial_model_gap, scaling_check, sharpness_scan,
    DbarUpCase, Gap1dReport, PhiSource, SharpnessPoint, SharpnessScan, SATURATION,
};

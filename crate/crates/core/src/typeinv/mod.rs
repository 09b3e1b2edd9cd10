//! Type invariants of homogeneous maps: kernel certificates on the critical
//! locus, disc orders and the sharp subellipticity order.

mod disc;
mod invariants;
mod kernel;
mod search;

pub use disc::{disc_order_verify, projective_order_of, projectively_nonsingular, DiscOrder};
pub use invariants::{
    hp_flatness, sharp_order, t_from_discs, t_invariant, t_invariant_with, type_report, HpReport,
    SharpOrder, TInvariant, TMode, TOptions, TypeReport,
};
pub use kernel::{
    canonical, critical_kernel_certificate, projective_kernel_dimension, CriticalLocus,
    KernelCertificate,
};
pub use search::{disc_order_search, DiscSearch, DiscSearchState, RANGE_TOL};

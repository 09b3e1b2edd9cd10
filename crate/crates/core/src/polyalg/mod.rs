//! Polynomials, polynomial maps and truncated power series.

mod jet;
mod map;
mod poly;
mod series;

pub use jet::{compose_jet, default_order, vanishing_order, Jet, Order, VecJet, VANISHING_TOL};
pub use map::{IsolatedZeroCertificate, MapJson, PolyMap, TermJson};
pub(crate) use map::random_sphere_point;
pub(crate) use poly::pow_u32;
pub use poly::{Exponent, MultiPoly, PRUNE_RELATIVE};
pub use series::{MatSeries, SeriesBasis};

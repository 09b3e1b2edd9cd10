//! Numerical toolkit for sharp subelliptic estimates on homogeneous special
//! domains `{Im w > |F(z)|^2}`.
//!
//! The modules follow the computational pipeline: polynomial and jet algebra
//! ([`polyalg`]), root clustering ([`rootgeom`]), Levi-form spectra and
//! approximate minimal eigenvector fields ([`leviform`]), discrete weighted
//! dbar forms ([`gaplab`]), type invariants ([`typeinv`]) and almost-harmonic
//! functions with shrinking disc families ([`almostharm`]).

pub mod almostharm;
pub mod certify;
pub mod error;
pub mod linalg;
pub mod polyalg;
pub mod gaplab;
pub mod leviform;
pub mod rootgeom;
pub mod typeinv;

pub use error::{Error, ErrorKind, Result};
pub use num_complex::Complex64;
pub use polyalg::{Jet, MultiPoly, Order, PolyMap, VecJet};

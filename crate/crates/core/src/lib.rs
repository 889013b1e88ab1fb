//! Numerical core for stationary two-fluid capillary-gravity waves that
//! develop splash contacts.
//!
//! The crate is organized around a periodic spectral layer (`spectral`),
//! the exact capillary wave family and its splash threshold (`crapper`),
//! curve-side geometry and weighted norms (`geometry`), singular integral
//! operators on interface curves (`operators`), scalar analysis kernels
//! used by the estimates (`analysis`), and the constrained stationary
//! solver with continuation in the density ratio and gravity (`solver`).
//!
//! All floating point work is `f64`; tolerances throughout are calibrated
//! to double precision and the dense operator sizes (N ≤ 2048) this crate
//! targets.

pub mod analysis;
pub mod crapper;
pub mod geometry;
pub mod operators;
pub mod quad;
mod rng;
pub mod solver;
pub mod spectral;

pub use geometry::WaveCurve;
pub use spectral::{Parity, PeriodicField, PeriodicGrid};

//! Andreev bound states and resonance widths of a one-dimensional
//! Bogoliubov-de Gennes model of a gated SNS junction, in the small-`h` regime.
//!
//! The crate pairs semiclassical quantization rules ([`semiclassical`]) with
//! two independent direct solvers ([`direct`]): a finite-difference banded
//! eigensolver with optional exterior complex scaling, and an ODE shooting
//! method with outgoing matching conditions.

pub mod direct;
pub mod geometry;
pub mod harness;
pub mod profile;
pub mod quadrature;
pub mod semiclassical;
pub mod special;

pub use geometry::ClassicalGeometry;
pub use profile::{BdgCoefficients, JunctionProfile, RampShape, SemiclassicalParams};
pub use semiclassical::{Level, Method, SpectrumResult};

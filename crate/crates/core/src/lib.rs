//! Exact and numerical tooling for the Stratonovich-Moyal deformation
//! quantization of the free loop space.

pub mod chaos;
pub mod equivalence;
pub mod exec;
pub mod fock;
pub mod gaussian;
pub mod poisson;
pub mod random;
pub mod report;
pub mod scalar;

pub use exec::Exec;
pub use fock::{FockError, FockVector, HbarSeries, ModeIndex, ModeMap, MultiIndex, Truncation};
pub use scalar::{Rational, Scalar};

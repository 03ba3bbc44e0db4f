//! Exact sparse algebra of the truncated symmetric Fock space over the loop
//! Hilbert space `H` (and its doubled version `H ⊕ H*`).
//!
//! Monomials are symmetrized basis tensors `ê_μ` indexed by multisets of
//! Fourier modes. With this normalization the Wick product is multiset
//! union with coefficient 1 and annihilation follows the multiplicity rule,
//! so the algebra is isomorphic to polynomials in the mode coordinates.

mod exponential;
pub mod mode;
pub mod norm;
mod series;
pub mod text;
mod vector;

pub use exponential::wick_exponential;
pub use mode::{basis_derivative, normalization, ModeIndex, MultiIndex, Truncation};
pub use norm::weighted_norm_upper;
pub use series::HbarSeries;
pub use text::{deserialize_fock, serialize_fock};
pub use vector::{FockVector, ModeMap};

pub(crate) use vector::{merge_partials, PRODUCT_CHUNK};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FockError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("series truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
}

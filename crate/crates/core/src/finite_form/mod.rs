//! Forms over `F_p`, their scalar extensions to `F_{p^m}`, and
//! Frobenius-semilinear subspace predicates.
//!
//! Fields are always explicit: an operation on a subspace over `F_{p^m}`
//! stays inside `F_{p^m}`. Statements that hold over an algebraic closure
//! are checked by choosing `m` large enough.

mod chain;
mod enumerate;
mod field;
mod space;
mod subspace;

pub use chain::{chain_vector, ChainData};
pub use enumerate::{
    enumerate_generatrices, enumerate_generatrices_with, grassmannian_size, GeneratrixFilter,
    DEFAULT_GRASSMANNIAN_BUDGET,
};
pub use field::{galois_field, search_modulus, Element, GaloisField, MAX_FIELD_SIZE};
pub use space::{FiniteQuadraticSpace, PrimeMatrix};
pub use subspace::{rref, Generatrix, Subspace};

pub(crate) use field::is_odd_prime;

//! Exact lattice algebra, forms over finite fields and the period data of
//! marked supersingular lattices.
//!
//! Everything is exact: integers are arbitrary precision and finite-field
//! arithmetic is table driven. Enumerations return canonically sorted
//! output whether or not they run in parallel.

pub mod error;
pub mod finite_form;
pub mod json;
pub mod lattice;
pub mod matrix;
pub mod periods;

pub use error::{Error, ErrorKind, Result};

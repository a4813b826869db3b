//! Exact computations with finite-dimensional connective dg quiver algebras.

pub mod algebra;
pub mod bimodule;
pub mod derived;
pub mod dimension;
pub mod error;
pub mod field;
pub mod linalg;
pub mod module;
pub mod presentation;
pub mod verify;

pub use algebra::{AlgebraMap, DgAlgebra, H0Algebra};
pub use error::{Error, ParseError, Result};
pub use field::{Field, FieldSpec, PrimeField, Rationals};

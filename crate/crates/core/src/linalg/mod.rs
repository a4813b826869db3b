//! Exact dense linear algebra and graded bookkeeping.

mod graded;
mod matrix;
pub mod sparse;

pub use graded::{BlockDecomposition, CochainComplex, CohomologyGroup, GradedLinearMap, GradedVectorSpace};
pub use matrix::{Matrix, Subspace};
pub use sparse::SparseVec;

//! Property checks of the dimension bounds on seeded random instances.

pub mod checks;
pub mod classical;
pub mod random;

pub use random::{random_algebra, random_map, random_module, RandomSpec};
pub use classical::{ClassicalOracle, ClassicalResolution};
pub use checks::{
    check_acyclic_bound, check_hom_theorem, check_tensor_bound, check_triangle_bound, classical_comparison, classical_regression, hom_bound,
    CheckReport, Failure, HomBound, Outcome, TrialRecord,
};

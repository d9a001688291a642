//! Functionals, right inverse and continuation.

pub mod fixed_point;
pub mod functional;
pub mod gram;
pub mod ontoness;
pub mod seed;

pub use fixed_point::{
    continuation_run, fixed_point_step, ContinuationOptions, ContinuationRun, ContinuationState, FixedPointOutcome,
    RunReport, StepRecord,
};
pub use functional::{
    evaluate_functional, select_relative_functional, FunctionalSpec, Part, Reference, Variant,
    DEFAULT_SELECTION_THRESHOLD,
};
pub use gram::{gram_basis, kernel_element, GramBasis, GRAM_CONDITION_LIMIT};
pub use ontoness::{ontoness_diagnostic, ontoness_predicate, OntonessReport};
pub use seed::{legendre_seed, SeedPolicy, DEFAULT_SEED};

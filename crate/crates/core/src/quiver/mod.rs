//! Quivers, integral representations and their centralizer data.

pub mod algebra;
pub mod builtins;
pub mod centralizer;
pub mod grading;
pub mod rep;

pub use algebra::{algebra_closure, EndAlgebra};
pub use builtins::{builtin_rep, to_submodule_instance, BuiltinRep, Params, BUILTIN_NAMES};
pub use centralizer::{centralizer_series, image_chain, nilpotency_class, CentralizerSeries};
pub use grading::{
    check_homogeneity, cocentral_grading, delta_conjugation_shifts, Grading, HomogeneityReport,
    Violation,
};
pub use rep::{Arrow, Quiver, Representation};

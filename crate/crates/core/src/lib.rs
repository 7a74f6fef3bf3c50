//! Zeta functions of integral nilpotent quiver representations.
//!
//! The crate counts finite-index subrepresentations at a fixed prime by enumerating lattices in
//! Hermite normal form, keeps a catalog of closed-form local zeta functions, and checks the
//! functional equations these satisfy under `q -> q^{-1}`.

pub mod arith;
pub mod closed_forms;
pub mod error;
pub mod funeq;
pub mod linalg;
pub mod ppartition;
pub mod lattice;
pub mod quiver;
pub mod suite;

pub use error::{Error, Result};

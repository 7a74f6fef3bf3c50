//! Sublattice enumeration, subrepresentation counts and lattice invariants.

pub mod count;
pub mod invariants;
pub mod local;

pub use count::{
    count_invariant_sublattices, count_subreps, is_subrep, is_subrep_matrices, predicted_candidates,
    CountOptions, CountTable, Mode,
};
pub use invariants::{
    is_maximal, m_2, m_tilde_1, nu_invariant, random_lattice, random_tuple, GradedRep, NuInvariant,
};
pub use local::{enum_sublattices, enum_sublattices_upto, sublattice_counts, LatticeTuple, LocalLattice};

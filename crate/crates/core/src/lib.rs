//! Permutation classes defined by avoiding partially ordered patterns.
//!
//! The crate covers classical and POP containment, bases of POP classes,
//! exact enumeration of classes, the regular insertion encoding criterion,
//! symmetry and Wilf classification, exact series of rational and algebraic
//! generating functions, and cached OEIS b-file comparisons.

pub mod perm;
pub mod poset;
pub mod pop;

pub use perm::{apply_symmetry, contains, count_occurrences, PermError, Permutation, SymmetryOp};
pub use poset::{enumerate_posets, Poset, PosetError, PosetTransform, TotalOrder};
pub use pop::{basis_of_pop, perm_of_total_order, pop_contains, pop_of_class, ClassError, PermClass};
pub mod enumerate;

pub use enumerate::{
    count_avoiders, count_pop_avoiders, counting_sequence, pop_counting_sequence, CountingSequence, EnumConfig,
    EnumError,
};
pub mod genfunc;

pub use genfunc::{
    algebraic_series, check_sequence_match, rational_series, AlgebraicGF, GenFunc, GfError, MatchReport, RationalGF,
};
pub mod classify;

pub use classify::{
    canonical_class, has_regular_insertion_encoding, juxtaposition_membership, pop_landscape, symmetry_orbit,
    wilf_partition, ClassifyError, Juxtaposition, LandscapeReport, WilfPartition,
};
pub mod oeis;

pub use oeis::{compare_with_oeis, ANumber, OeisClient, OeisError, OeisSequence};
pub mod reproduce;

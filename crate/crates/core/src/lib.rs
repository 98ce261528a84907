//! Exact combinatorics, measures and samplers for the m-Dyck shift.
//!
//! The two-sided m-Dyck shift consists of bi-infinite sequences over
//! `m` bracket pairs in which no opener is ever closed by a bracket of
//! another type. This crate works with the finite data behind it: words,
//! their reduction in the syntactic monoid, exact counts, cylinder
//! measures of the invariant probabilities, finite holonomies, and
//! samplers producing finite windows of typical points.

pub mod counting;
pub mod holonomies;
pub mod measures;
pub mod numeric;
pub mod samplers;
pub mod word_algebra;

pub use word_algebra::{Symbol, Word};

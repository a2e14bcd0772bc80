//! Enumeration of pattern-avoiding labelled diamond posets.
//!
//! A diamond is a task-precedence poset with one least task, one
//! greatest task, and incomparable middle tasks. Rows of labelled
//! diamonds read off to permutations; this crate counts the labellings
//! whose permutation avoids a given set of patterns, computes their
//! descent generating functions by closed form, recursion, or pruned
//! brute-force search, and realizes the statistic-preserving bijection
//! between 132-avoiders and generalized Dyck paths.
//!
//! The brute-force search is the ground truth the faster methods are
//! checked against; it splits work over the first diamond's labelling
//! and runs the subtrees in parallel when the `parallel` feature
//! (enabled by default) is on.

pub mod dyck;
pub mod enumerate;
pub mod gfd;
pub mod patterns;
pub mod poly;
pub mod poset;

pub use enumerate::{Budget, EnumerateError};
pub use gfd::{FamilyResult, GfdError, GfdTable, Method, RecursionKind};
pub use patterns::{Pattern, PatternSet, Permutation};
pub use poly::DescentPoly;
pub use poset::{Diamond, LabelledSystem, PartialDiamond, PosetError, SystemShape, Violation};

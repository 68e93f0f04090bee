//! Exact computation of invariants attached to branch curves of generic
//! projections and branched covers: arithmetic in the reduced braid group
//! `B~_n`, Zariski-Van Kampen presentations from braid factorizations,
//! finitely presented group oracles (coset enumeration, subgroup
//! presentations), degeneration-diagram constraint pipelines producing the
//! subgroup `Lambda` of `Z^2`, and the homological cross-checks from
//! intersection pairing data.
//!
//! Everything is exact integer arithmetic; there is no floating point
//! anywhere in the computational core.

pub mod braidvk;
pub mod diagram;
pub mod fpgroup;
pub mod homology;
pub mod intlinalg;
pub mod perm;
pub mod suites;
pub mod tbraid;
pub mod words;

pub use intlinalg::{InvariantFactors, IntMatrix};
pub use perm::Perm;
pub use words::{BraidWord, FreeWord};

//! Exact computations on Cameron-Liebler classes of k-subsets of an n-set.
//!
//! A family of k-sets is a Cameron-Liebler class when it meets every
//! k-uniform partition in the same number of sets. This crate decides that
//! property five independent ways (partitions, disjointness counts, a Kneser
//! eigenvector test, row-space membership, kernel orthogonality), verifies
//! the Kneser spectrum exactly, and enumerates classes for small parameters.
//!
//! All arithmetic is exact: machine integers with checked overflow falling
//! back to arbitrary precision.

pub mod classify;
pub mod cli;
pub mod clkernel;
pub mod error;
pub mod exactla;
pub mod setcore;
pub mod spectral;

pub use error::{Error, Result};

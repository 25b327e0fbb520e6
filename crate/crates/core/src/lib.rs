//! Exact braid monodromy for real plane curves built from lines and conics.
//!
//! The crate is layered bottom up: [`braid`] (words, Artin action, bands),
//! [`notation`] (decorated path expressions), [`moves`] (model disks and the
//! level changing motions), [`engine`] (tables to factorizations) and
//! [`arrangement`] (equations to tables).

pub mod arrangement;
pub mod braid;
pub mod check;
pub mod describe;
pub mod dictionary;
pub mod engine;
pub mod moves;
pub mod notation;

pub use braid::{block_halftwist, parse_braid, Band, BraidError, BraidWord, FreeWord, Permutation};

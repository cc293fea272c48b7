//! Compressed permutations built on the entropy of their run decompositions.

pub mod bits;
pub mod bitvector;
pub mod code_tree;
pub mod error;
pub mod generate;
mod merge;
pub mod perm;
pub mod runs;
pub mod seq;
pub mod sort;
mod splay;
pub mod strict;
pub mod sus;
pub mod symbols;
pub mod wavelet;

pub use bitvector::{BitVector, BitVectorVariant, SpaceUsage};
pub use error::{Error, Result};

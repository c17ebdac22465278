//! Numerical building blocks: banded LU factorization, sparse row matrices,
//! a deterministic RNG for reproducible iterative solves, and real-eigenpair
//! extraction from small dense matrices.

pub mod banded;
pub mod eig;
pub mod rng;
pub mod sparse;

pub use banded::{BandedLu, BandedMatrix};
pub use rng::SplitMix64;
pub use sparse::RowMat;

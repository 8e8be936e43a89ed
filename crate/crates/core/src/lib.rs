//! Line transversals, geometric permutations and pinning configurations of
//! congruent balls in R^3.

pub mod conjecture;
pub mod error;
pub mod geometry;
pub mod lemmas;
pub mod optim;
pub mod pinning;
pub mod sampling;
pub mod sec;
pub mod tol;
pub mod transversal;

pub use error::{Error, Result};
